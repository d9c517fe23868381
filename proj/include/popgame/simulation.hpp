#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "popgame/ensemble.hpp"
#include "popgame/game.hpp"
#include "popgame/riccati.hpp"
#include "popgame/types.hpp"

namespace popgame {

// argmin_a (Phi (x - y))^T (u(a,q) - x), lowest index on ties. With
// Phi = c I this is the bang-bang region of x.
std::size_t best_response(const VectorPayoffGame& game, const SimplexVector& q,
                          const Vector& x, const Matrix& phi, const Vector& y);

// Exact solution of x' = u(a,q) - x over log-time ds.
Vector step_agent(const VectorPayoffGame& game, const Vector& x, std::size_t action,
                  const SimplexVector& q, double ds);

// Feedback flow x' = u(sigma(x), q) - x with sigma the Phi-weighted
// bang-bang rule, integrated across switching surfaces. Between switches
// the motion is an exact exponential arc toward a single anchor; on a
// surface that traps the flow, toward the Filippov combination of the tied
// anchors (whose weights are constant along the surface).
class FeedbackFlow {
 public:
  FeedbackFlow(std::vector<Vector> anchors, Vector target, Matrix weight);

  Vector advance(Vector x, double duration) const;

  std::size_t max_events = 100000;

 private:
  bool sliding_weights(const Vector& x, const std::vector<std::size_t>& active,
                       Vector& w) const;

  std::vector<Vector> anchors_;
  Vector target_;
  Matrix weight_;
  std::vector<Vector> offsets_;  // anchors - target
  double anchor_scale_ = 1.0;
};

struct FixedTarget {
  SimplexVector q;
  Vector y;
};

// q is re-estimated from the ensemble every step; y follows from (p, q).
struct SelfConfirming {
  SimplexVector p;
  SimplexVector q;
};

using PopulationMode = std::variant<FixedTarget, SelfConfirming>;

struct SimulationOptions {
  double s_max = 10.0;
  double ds = 0.1;
  std::size_t riccati_steps = 1000;
  // Throws if any particle leaves X by more than this.
  double membership_tolerance = 1e-9;
  std::size_t membership_check_stride = 1;
};

struct Snapshot {
  std::size_t step;
  double s;
  double t;
  Vector q;
  Vector y;
  Vector mean;
  double mean_distance;
  double max_distance;
  double mean_cost;
};

struct SimulationRecord {
  std::vector<Snapshot> snapshots;
  ParticleEnsemble final_ensemble;
  std::vector<double> cost;  // per particle J
  double mean_cost = 0.0;
  std::vector<std::size_t> initial_actions;
};

// Passed to the observer after every step.
struct StepView {
  std::size_t step;
  double s;  // log-time at step start
  double ds;
  const SimplexVector& q;
  const Vector& y;
  const ParticleEnsemble& before;
  const ParticleEnsemble& after;
  std::span<const std::size_t> actions;
};

using StepObserver = std::function<void(const StepView&)>;

SimulationRecord simulate_population(const VectorPayoffGame& game, const CostSpec& spec,
                                     const ParticleEnsemble& rho0,
                                     const PopulationMode& mode,
                                     const SimulationOptions& options = {},
                                     const StepObserver& observer = {});

// Running cost on [t_0, T] by the left rectangle rule over the samples plus
// the terminal cost at the first sample with t >= T (or the last sample).
class CostAccumulator {
 public:
  CostAccumulator(const CostSpec& spec, Vector y);

  void add_sample(double t, const Vector& x);
  // Later samples are measured against y (self-confirming runs move it).
  void set_target(Vector y) { y_ = std::move(y); }
  double total() const;

 private:
  const CostSpec* spec_;
  Vector y_;
  double running_ = 0.0;
  double terminal_ = 0.0;
  bool have_prev_ = false;
  bool terminal_set_ = false;
  double prev_t_ = 0.0;
  Vector prev_x_;
};

struct TimedState {
  double t;
  Vector x;
};

double evaluate_cost(const CostSpec& spec, std::span<const TimedState> trajectory,
                     const Vector& y);

}  // namespace popgame
