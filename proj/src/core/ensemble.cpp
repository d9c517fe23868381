#include "popgame/ensemble.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <algorithm>

#include <Eigen/SVD>

#include "popgame/approachability.hpp"
#include "popgame/error.hpp"
#include "popgame/polytope.hpp"

namespace popgame {

ParticleEnsemble::ParticleEnsemble(std::vector<Vector> positions,
                                   std::vector<double> weights, double time)
    : positions_(std::move(positions)), weights_(std::move(weights)), time_(time) {
  if (positions_.empty()) throw ValidationError("ensemble has no particles");
  if (weights_.size() != positions_.size())
    throw ValidationError("ensemble has " + std::to_string(weights_.size()) +
                          " weights for " + std::to_string(positions_.size()) +
                          " particles");
  dim_ = static_cast<std::size_t>(positions_.front().size());
  // Compensated sum so the tolerance holds for large equal-weight ensembles.
  double total = 0.0, carry = 0.0;
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    if (static_cast<std::size_t>(positions_[i].size()) != dim_)
      throw ValidationError("particle " + std::to_string(i) + " has the wrong dimension");
    if (!positions_[i].allFinite())
      throw ValidationError("particle " + std::to_string(i) + " is not finite");
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i]))
      throw ValidationError("particle " + std::to_string(i) + " has a negative weight");
    const double term = weights_[i] - carry;
    const double next = total + term;
    carry = (next - total) - term;
    total = next;
  }
  if (std::abs(total - 1.0) > kWeightTolerance)
    throw ValidationError("ensemble weights sum to " + std::to_string(total));
}

ParticleEnsemble::ParticleEnsemble(std::vector<Vector> positions, double time)
    : ParticleEnsemble(positions,
                       std::vector<double>(positions.size(),
                                           positions.empty() ? 0.0
                                                             : 1.0 / static_cast<double>(positions.size())),
                       time) {}

Vector mean_state(const ParticleEnsemble& rho) {
  Vector m = Vector::Zero(static_cast<Eigen::Index>(rho.dim()));
  for (std::size_t i = 0; i < rho.size(); ++i) m += rho.weight(i) * rho.position(i);
  return m;
}

namespace {

// Orthonormal coordinates on the affine hull of the vertices.
struct AffineFrame {
  Vector origin;
  Matrix basis;  // m x r
  Vector lo, hi; // box of the vertices in frame coordinates
};

AffineFrame affine_frame(const PayoffPolytope& poly) {
  const auto& v = poly.vertices();
  const auto m = static_cast<Eigen::Index>(poly.dim());
  AffineFrame f;
  f.origin = Vector::Zero(m);
  for (const Vector& p : v) f.origin += p;
  f.origin /= static_cast<double>(v.size());
  Matrix spread(m, static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    spread.col(static_cast<Eigen::Index>(i)) = v[i] - f.origin;
  Eigen::JacobiSVD<Matrix> svd(spread, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, sv.size() ? sv[0] : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] > cutoff) ++rank;
  f.basis = svd.matrixU().leftCols(rank);
  f.lo = Vector::Constant(rank, std::numeric_limits<double>::infinity());
  f.hi = Vector::Constant(rank, -std::numeric_limits<double>::infinity());
  for (const Vector& p : v) {
    const Vector z = f.basis.transpose() * (p - f.origin);
    f.lo = f.lo.cwiseMin(z);
    f.hi = f.hi.cwiseMax(z);
  }
  return f;
}

Vector draw(const AffineFrame& f, Rng& rng) {
  Vector z(f.basis.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.uniform(f.lo[i], f.hi[i]);
  return f.origin + f.basis * z;
}

constexpr std::size_t kMaxRejections = 10000000;

}  // namespace

ParticleEnsemble sample_uniform(const PayoffPolytope& poly, std::size_t n,
                                std::uint64_t seed) {
  if (n == 0) throw ValidationError("particle count must be positive");
  const AffineFrame frame = affine_frame(poly);
  Rng rng(seed);
  std::vector<Vector> out;
  out.reserve(n);
  std::size_t tries = 0;
  while (out.size() < n) {
    if (++tries > kMaxRejections + n)
      throw ValidationError("rejection sampling failed to fill the polytope");
    Vector x = draw(frame, rng);
    if (poly.contains(x)) out.push_back(std::move(x));
  }
  return ParticleEnsemble(std::move(out));
}

ParticleEnsemble sample_stratified(const PayoffPolytope& poly,
                                   const RegionPartition& part,
                                   const std::vector<double>& fractions,
                                   std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("particle count must be positive");
  const std::size_t k = part.anchors().size();
  if (fractions.size() != k)
    throw ValidationError("need one fraction per region (" + std::to_string(k) + ")");
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw ValidationError("region fractions must be nonnegative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("region fractions must sum to 1");

  // Largest-remainder rounding of n * fraction.
  std::vector<std::size_t> quota(k);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double exact = fractions[i] * static_cast<double>(n);
    quota[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++quota[remainders[i % k].second];

  const AffineFrame frame = affine_frame(poly);
  Rng rng(seed);
  std::vector<Vector> out;
  out.reserve(n);
  std::size_t tries = 0;
  while (out.size() < n) {
    if (++tries > kMaxRejections + n)
      throw ValidationError("stratified sampling cannot reach a region with positive quota");
    Vector x = draw(frame, rng);
    const std::size_t r = part.assign(x);
    if (quota[r] == 0 || !poly.contains(x)) continue;
    --quota[r];
    out.push_back(std::move(x));
  }
  return ParticleEnsemble(std::move(out));
}

ParticleEnsemble sample_lattice(const PayoffPolytope& poly, double spacing) {
  if (!(spacing > 0.0)) throw ValidationError("lattice spacing must be positive");
  const AffineFrame frame = affine_frame(poly);
  const Eigen::Index r = frame.basis.cols();
  std::vector<Vector> out;
  if (r == 0) {
    out.push_back(frame.origin);
    return ParticleEnsemble(std::move(out));
  }
  std::vector<long> count(static_cast<std::size_t>(r));
  double cells = 1.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    count[static_cast<std::size_t>(i)] =
        static_cast<long>(std::floor((frame.hi[i] - frame.lo[i]) / spacing + 1e-9)) + 1;
    cells *= static_cast<double>(count[static_cast<std::size_t>(i)]);
  }
  if (cells > 5e6) throw ValidationError("lattice spacing too fine");
  std::vector<long> idx(static_cast<std::size_t>(r), 0);
  while (true) {
    Vector z(r);
    for (Eigen::Index i = 0; i < r; ++i)
      z[i] = frame.lo[i] + spacing * static_cast<double>(idx[static_cast<std::size_t>(i)]);
    Vector x = frame.origin + frame.basis * z;
    if (poly.contains(x)) out.push_back(std::move(x));
    std::size_t d = 0;
    while (d < idx.size() && ++idx[d] == count[d]) idx[d++] = 0;
    if (d == idx.size()) break;
  }
  if (out.empty()) throw ValidationError("lattice has no points inside the polytope");
  return ParticleEnsemble(std::move(out));
}

}  // namespace popgame
