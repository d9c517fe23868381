#include "popgame/game.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "popgame/error.hpp"

namespace popgame {

namespace {

std::string describe(const Vector& v) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")";
  return os.str();
}

}  // namespace

SimplexVector::SimplexVector(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw ValidationError("simplex vector is empty");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    const double w = weights_[i];
    if (!std::isfinite(w) || w < 0.0)
      throw ValidationError("simplex vector " + describe(weights_) +
                            " has a negative or non-finite component");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kTolerance)
    throw ValidationError("simplex vector " + describe(weights_) + " sums to " +
                          std::to_string(sum) + ", expected 1");
}

SimplexVector SimplexVector::unit(std::size_t n, std::size_t k) {
  if (k >= n) throw ValidationError("unit simplex index out of range");
  Vector w = Vector::Zero(static_cast<Eigen::Index>(n));
  w[static_cast<Eigen::Index>(k)] = 1.0;
  return SimplexVector(std::move(w), Unchecked{});
}

SimplexVector SimplexVector::uniform(std::size_t n) {
  if (n == 0) throw ValidationError("simplex vector is empty");
  return SimplexVector(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / n),
                       Unchecked{});
}

SimplexVector SimplexVector::normalized(const Vector& weights) {
  Vector w = weights.cwiseMax(0.0);
  const double sum = w.sum();
  if (!(sum > 0.0) || !std::isfinite(sum))
    throw ValidationError("cannot normalise " + describe(weights) + " onto the simplex");
  w /= sum;
  return SimplexVector(std::move(w), Unchecked{});
}

SimplexVector SimplexVector::project(const Vector& point) {
  // Sort-based Euclidean projection (Held, Wolfe, Crowder).
  const Eigen::Index n = point.size();
  if (n == 0) throw ValidationError("simplex vector is empty");
  std::vector<double> sorted(point.data(), point.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumulative += sorted[static_cast<std::size_t>(i)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[static_cast<std::size_t>(i)] - candidate > 0.0) theta = candidate;
  }
  Vector w = (point.array() - theta).cwiseMax(0.0).matrix();
  return normalized(w);
}

VectorPayoffGame::VectorPayoffGame(std::vector<std::string> action_names,
                                   std::size_t payoff_dim,
                                   std::vector<std::vector<Vector>> payoffs)
    : names_(std::move(action_names)), dim_(payoff_dim) {
  const std::size_t n = names_.size();
  if (n == 0) throw ValidationError("game has no actions");
  if (dim_ == 0) throw ValidationError("payoff_dim must be positive");
  if (payoffs.size() != n)
    throw ValidationError("payoff table has " + std::to_string(payoffs.size()) +
                          " rows, expected " + std::to_string(n));
  payoffs_.reserve(n * n);
  for (std::size_t l = 0; l < n; ++l) {
    if (payoffs[l].size() != n)
      throw ValidationError("payoff row " + std::to_string(l) + " has " +
                            std::to_string(payoffs[l].size()) + " entries, expected " +
                            std::to_string(n));
    for (std::size_t k = 0; k < n; ++k) {
      Vector& v = payoffs[l][k];
      if (static_cast<std::size_t>(v.size()) != dim_)
        throw ValidationError("payoff (" + std::to_string(l) + "," + std::to_string(k) +
                              ") has length " + std::to_string(v.size()) +
                              ", expected payoff_dim " + std::to_string(dim_));
      if (!v.allFinite())
        throw ValidationError("payoff (" + std::to_string(l) + "," + std::to_string(k) +
                              ") is not finite");
      payoffs_.push_back(std::move(v));
    }
  }
}

Vector VectorPayoffGame::mixed_payoff(std::size_t action, const SimplexVector& q) const {
  if (action >= n_actions())
    throw ValidationError("action index " + std::to_string(action) + " out of range");
  if (q.size() != n_actions())
    throw ValidationError("population strategy has wrong length");
  Vector u = Vector::Zero(static_cast<Eigen::Index>(dim_));
  for (std::size_t k = 0; k < n_actions(); ++k) u += q[k] * payoff(action, k);
  return u;
}

Vector VectorPayoffGame::bilinear_payoff(const SimplexVector& p,
                                         const SimplexVector& q) const {
  if (p.size() != n_actions()) throw ValidationError("target weights have wrong length");
  Vector y = Vector::Zero(static_cast<Eigen::Index>(dim_));
  for (std::size_t l = 0; l < n_actions(); ++l) y += p[l] * mixed_payoff(l, q);
  return y;
}

std::vector<Vector> VectorPayoffGame::anchors(const SimplexVector& q) const {
  std::vector<Vector> out;
  out.reserve(n_actions());
  for (std::size_t k = 0; k < n_actions(); ++k) out.push_back(mixed_payoff(k, q));
  return out;
}

VectorPayoffGame regret_transform(const ScalarGame& base) {
  const auto n = static_cast<std::size_t>(base.payoff.rows());
  if (base.payoff.cols() != base.payoff.rows())
    throw ValidationError("scalar game must be square");
  if (base.action_names.size() != n)
    throw ValidationError("scalar game action names do not match its payoff matrix");
  if (!base.payoff.allFinite()) throw ValidationError("scalar game payoffs are not finite");
  std::vector<std::vector<Vector>> table(n, std::vector<Vector>(n));
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t k = 0; k < n; ++k) {
      Vector r(static_cast<Eigen::Index>(n));
      const auto li = static_cast<Eigen::Index>(l);
      const auto ki = static_cast<Eigen::Index>(k);
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j)
        r[j] = base.payoff(j, ki) - base.payoff(li, ki);
      table[l][k] = std::move(r);
    }
  }
  return VectorPayoffGame(base.action_names, n, std::move(table));
}

}  // namespace popgame
