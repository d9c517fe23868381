#include "popgame/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "popgame/approachability.hpp"
#include "popgame/ensemble.hpp"
#include "popgame/error.hpp"

namespace popgame {

EquilibriumCandidate EquilibriumCandidate::from_mixture(const VectorPayoffGame& game,
                                                        SimplexVector p, SimplexVector q) {
  if (p.size() != game.n_actions() || q.size() != game.n_actions())
    throw ValidationError("p and q must have one entry per action (" +
                          std::to_string(game.n_actions()) + ")");
  Vector y = game.bilinear_payoff(p, q);
  return {std::move(p), std::move(q), std::move(y), false};
}

EquilibriumCandidate EquilibriumCandidate::with_target(SimplexVector p, SimplexVector q,
                                                       Vector y) {
  if (p.size() != q.size()) throw ValidationError("p and q lengths differ");
  return {std::move(p), std::move(q), std::move(y), true};
}

EquilibriumCandidate EquilibriumCandidate::with_q(const VectorPayoffGame& game,
                                                  SimplexVector next_q) const {
  if (pinned) return with_target(p, std::move(next_q), y);
  return from_mixture(game, p, std::move(next_q));
}

void FlowParameters::validate() const {
  if (!(kappa > 0.0)) throw ValidationError("kappa must be positive");
  if (!(step > 0.0 && step <= 1.0)) throw ValidationError("damping step must lie in (0, 1]");
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  if (max_iter == 0) throw ValidationError("max_iter must be positive");
}

SimplexVector induced_density(const VectorPayoffGame& game, const ParticleEnsemble& rho,
                              const EquilibriumCandidate& cand) {
  if (rho.size() == 0) throw ValidationError("empty ensemble");
  if (rho.dim() != game.payoff_dim())
    throw ValidationError("ensemble dimension does not match the payoff dimension");
  const RegionPartition part = RegionPartition::from_game(game, cand.q, cand.y);
  Vector mass = Vector::Zero(static_cast<Eigen::Index>(game.n_actions()));
  for (std::size_t i = 0; i < rho.size(); ++i)
    mass[static_cast<Eigen::Index>(part.assign(rho.position(i)))] += rho.weight(i);
  return SimplexVector::normalized(mass);
}

EstimateError estimate_error(const SimplexVector& q, const SimplexVector& q_tilde) {
  if (q.size() != q_tilde.size()) throw ValidationError("q and q~ lengths differ");
  Vector nu = q.weights() - q_tilde.weights();
  const double l = 0.5 * nu.squaredNorm();
  return {std::move(nu), l};
}

FixedPointResult fixed_point_solve(const VectorPayoffGame& game,
                                   const ParticleEnsemble& rho,
                                   const EquilibriumCandidate& initial,
                                   const FlowParameters& params,
                                   std::vector<SolverLogRow>* progress) {
  params.validate();
  EquilibriumCandidate cand = initial;
  std::vector<double> trace;
  std::vector<SolverLogRow> log;
  for (std::size_t it = 0; it <= params.max_iter; ++it) {
    const SimplexVector qt = induced_density(game, rho, cand);
    const EstimateError err = estimate_error(cand.q, qt);
    const double nu_inf = err.nu.lpNorm<Eigen::Infinity>();
    trace.push_back(err.lyapunov);
    log.push_back({it, err.lyapunov, nu_inf, cand.q.weights()});
    if (progress) progress->push_back(log.back());
    if (nu_inf <= params.tol) return {cand, trace, log, it};
    if (it == params.max_iter) break;
    const Vector next = (1.0 - params.step) * cand.q.weights() + params.step * qt.weights();
    cand = cand.with_q(game, SimplexVector::normalized(next));
  }
  throw NoConvergence("fixed-point iteration did not reach tolerance " +
                          std::to_string(params.tol) + " in " +
                          std::to_string(params.max_iter) + " iterations (final L = " +
                          std::to_string(trace.back()) + ")",
                      trace.back(), trace);
}

bool lyapunov_decay_check(std::span<const double> trace, double kappa, double dt) {
  if (trace.empty()) throw ValidationError("empty Lyapunov trace");
  if (!(kappa > 0.0)) throw ValidationError("kappa must be positive");
  const double l0 = trace.front();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double bound = std::exp(-2.0 * kappa * static_cast<double>(i) * dt) * l0 * (1.0 + 1e-6);
    if (trace[i] > bound) return false;
  }
  return true;
}

namespace {

enum class Slot { p, q };

EquilibriumCandidate perturbed(const VectorPayoffGame& game, const EquilibriumCandidate& c,
                               Slot slot, const SimplexVector& moved) {
  if (slot == Slot::q) return c.with_q(game, moved);
  if (c.pinned) return EquilibriumCandidate::with_target(moved, c.q, c.y);
  return EquilibriumCandidate::from_mixture(game, moved, c.q);
}

// Central difference of q~ along `dir` in one slot. The step has length h
// along the unit direction and is divided by the step actually taken after
// projecting back onto the simplex; the result scales linearly with |dir|.
Vector directional_jacobian(const VectorPayoffGame& game, const ParticleEnsemble& rho,
                            const EquilibriumCandidate& c, Slot slot, const Vector& dir,
                            double h) {
  const Eigen::Index n = static_cast<Eigen::Index>(game.n_actions());
  const double len = dir.norm();
  if (len == 0.0) return Vector::Zero(n);
  if (slot == Slot::p && c.pinned) return Vector::Zero(n);
  const Vector unit = dir / len;
  const SimplexVector& base = slot == Slot::p ? c.p : c.q;
  const SimplexVector plus = SimplexVector::project(base.weights() + h * unit);
  const SimplexVector minus = SimplexVector::project(base.weights() - h * unit);
  const double eff = (plus.weights() - minus.weights()).dot(unit);
  if (eff <= 1e-12 * h) return Vector::Zero(n);
  const Vector up = induced_density(game, rho, perturbed(game, c, slot, plus)).weights();
  const Vector down = induced_density(game, rho, perturbed(game, c, slot, minus)).weights();
  return len * (up - down) / eff;
}

Vector checked_jacobian(const VectorPayoffGame& game, const ParticleEnsemble& rho,
                        const EquilibriumCandidate& c, Slot slot, const Vector& dir,
                        double h) {
  const Vector coarse = directional_jacobian(game, rho, c, slot, dir, h);
  const Vector fine = directional_jacobian(game, rho, c, slot, dir, 0.5 * h);
  const double scale = std::max(coarse.norm(), fine.norm());
  if (scale > 1e-9 && (coarse - fine).norm() > 0.1 * scale)
    throw ValidationError("finite-difference step h = " + std::to_string(h) +
                          " is below the ensemble resolution (estimates at h and h/2 "
                          "differ by more than 10%)");
  return coarse;
}

void check_tangent(const Vector& v, std::size_t n, const char* name) {
  if (static_cast<std::size_t>(v.size()) != n)
    throw ValidationError(std::string(name) + " must have one entry per action");
  if (std::abs(v.sum()) > 1e-9)
    throw ValidationError(std::string(name) + " must be tangent to the simplex");
}

}  // namespace

Vector error_flow_derivative(const VectorPayoffGame& game, const ParticleEnsemble& rho,
                             const EquilibriumCandidate& cand, const Vector& pdot,
                             const Vector& qdot, double h) {
  if (!(h > 0.0)) throw ValidationError("finite-difference step must be positive");
  check_tangent(pdot, game.n_actions(), "pdot");
  check_tangent(qdot, game.n_actions(), "qdot");
  return qdot - checked_jacobian(game, rho, cand, Slot::p, pdot, h) -
         checked_jacobian(game, rho, cand, Slot::q, qdot, h);
}

std::vector<Vector> tangent_unit_directions(std::size_t n) {
  std::vector<Vector> out;
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      Vector d = Vector::Zero(static_cast<Eigen::Index>(n));
      d[static_cast<Eigen::Index>(i)] = s;
      d[static_cast<Eigen::Index>(j)] = -s;
      out.push_back(std::move(d));
    }
  return out;
}

std::vector<Vector> feasible_tangent_directions(const SimplexVector& at) {
  std::vector<Vector> out;
  for (Vector& d : tangent_unit_directions(at.size())) {
    Eigen::Index j = 0;
    d.minCoeff(&j);
    if (at.weights()[j] > SimplexVector::kTolerance) out.push_back(std::move(d));
  }
  return out;
}

bool nonuniqueness_check(const VectorPayoffGame& game, const ParticleEnsemble& rho,
                         const EquilibriumCandidate& cand,
                         const std::vector<Vector>& lambdas,
                         const NonuniquenessOptions& options) {
  const EstimateError err = estimate_error(cand.q, induced_density(game, rho, cand));
  if (err.lyapunov > options.lyapunov_tol)
    throw ValidationError("candidate is not a fixed point (L = " +
                          std::to_string(err.lyapunov) + ")");
  if (lambdas.empty()) throw ValidationError("empty lambda grid");

  // nu-dot is linear in (pdot, qdot), so the p and q contributions of every
  // grid direction are computed once and combined.
  const Eigen::Index n = static_cast<Eigen::Index>(game.n_actions());
  std::vector<Vector> p_terms{Vector::Zero(n)};
  std::vector<Vector> q_terms{Vector::Zero(n)};
  for (const Vector& d : feasible_tangent_directions(cand.p))
    p_terms.push_back(-checked_jacobian(game, rho, cand, Slot::p, d, options.h));
  for (const Vector& d : feasible_tangent_directions(cand.q))
    q_terms.push_back(d - checked_jacobian(game, rho, cand, Slot::q, d, options.h));

  for (const Vector& lambda : lambdas) {
    if (lambda.size() != n) throw ValidationError("lambda must have one entry per action");
    double lo = 0.0, hi = 0.0;
    for (const Vector& a : p_terms)
      for (const Vector& b : q_terms) {
        const double v = lambda.dot(a + b);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    if (!(lo < -options.sign_tol && hi > options.sign_tol)) return false;
  }
  return true;
}

}  // namespace popgame
