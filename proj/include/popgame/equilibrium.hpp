#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "popgame/game.hpp"
#include "popgame/types.hpp"

namespace popgame {

class ParticleEnsemble;

// Hypothesised pair (p, q) and its target y = sum p_l q_k M_lk. A scenario
// may pin y instead, in which case y is held fixed while q moves.
struct EquilibriumCandidate {
  SimplexVector p;
  SimplexVector q;
  Vector y;
  bool pinned = false;

  static EquilibriumCandidate from_mixture(const VectorPayoffGame& game,
                                           SimplexVector p, SimplexVector q);
  static EquilibriumCandidate with_target(SimplexVector p, SimplexVector q, Vector y);

  // Same p (and pinned y, if any) with a new q.
  EquilibriumCandidate with_q(const VectorPayoffGame& game, SimplexVector next_q) const;
};

struct EstimateError {
  Vector nu;         // q - q~
  double lyapunov;   // 0.5 nu^T nu
};

struct FlowParameters {
  double kappa = 1.0;
  double step = 0.5;   // damping eta in (0, 1]
  std::size_t max_iter = 200;
  double tol = 1e-3;

  void validate() const;
};

// q~_k: weighted mass of particles that the bang-bang partition around the
// candidate's target sends to action k.
SimplexVector induced_density(const VectorPayoffGame& game, const ParticleEnsemble& rho,
                              const EquilibriumCandidate& cand);

EstimateError estimate_error(const SimplexVector& q, const SimplexVector& q_tilde);

struct SolverLogRow {
  std::size_t iteration;
  double lyapunov;
  double nu_inf;
  Vector q;
};

struct FixedPointResult {
  EquilibriumCandidate candidate;
  std::vector<double> lyapunov_trace;
  std::vector<SolverLogRow> log;
  std::size_t iterations;  // index of the certifying iteration
};

// Damped iteration q <- (1 - eta) q + eta q~(p, q), p held fixed.
// Throws NoConvergence after max_iter; `progress`, when given, receives the
// log rows as they are produced (so it survives the throw).
FixedPointResult fixed_point_solve(const VectorPayoffGame& game,
                                   const ParticleEnsemble& rho,
                                   const EquilibriumCandidate& initial,
                                   const FlowParameters& params,
                                   std::vector<SolverLogRow>* progress = nullptr);

// L(i dt) <= exp(-2 kappa i dt) L(0) (1 + 1e-6) for every sample.
bool lyapunov_decay_check(std::span<const double> trace, double kappa, double dt);

// Directional derivative of nu along (pdot, qdot):
//   -d_p q~ pdot + qdot - d_q q~ qdot
// with central differences of induced_density, stepping a distance h along
// each unit direction. Throws ValidationError when
// the estimates at h and h/2 disagree by more than 10%.
Vector error_flow_derivative(const VectorPayoffGame& game, const ParticleEnsemble& rho,
                             const EquilibriumCandidate& cand, const Vector& pdot,
                             const Vector& qdot, double h = 1e-3);

// Feasible unit directions e_i - e_j of the simplex at `at` (only those
// that do not push a zero component negative), normalised.
std::vector<Vector> feasible_tangent_directions(const SimplexVector& at);
// All normalised e_i - e_j, i != j.
std::vector<Vector> tangent_unit_directions(std::size_t n);

struct NonuniquenessOptions {
  double h = 1e-3;
  double lyapunov_tol = 1e-12;
  double sign_tol = 1e-9;
};

// True iff every lambda admits tangent moves (pdot, qdot) giving both a
// negative and a positive lambda^T nu-dot. Throws ValidationError if the
// candidate is not a fixed point.
bool nonuniqueness_check(const VectorPayoffGame& game, const ParticleEnsemble& rho,
                         const EquilibriumCandidate& cand,
                         const std::vector<Vector>& lambdas,
                         const NonuniquenessOptions& options = {});

}  // namespace popgame
