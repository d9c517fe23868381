#include "popgame/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/QR>

#include "popgame/equilibrium.hpp"
#include "popgame/error.hpp"
#include "popgame/polytope.hpp"

namespace popgame {

std::size_t best_response(const VectorPayoffGame& game, const SimplexVector& q,
                          const Vector& x, const Matrix& phi, const Vector& y) {
  // (Phi (x - y))^T (u - x) and (Phi (x - y))^T (u - y) differ by a term
  // that does not depend on the action; the second form matches
  // region_assign bit for bit when Phi = I.
  const Vector g = phi * (x - y);
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < game.n_actions(); ++a) {
    const double s = g.dot(game.mixed_payoff(a, q) - y);
    if (s < best_score) {
      best_score = s;
      best = a;
    }
  }
  return best;
}

Vector step_agent(const VectorPayoffGame& game, const Vector& x, std::size_t action,
                  const SimplexVector& q, double ds) {
  if (!(ds > 0.0)) throw ValidationError("ds must be positive");
  const Vector u = game.mixed_payoff(action, q);
  return u + (x - u) * std::exp(-ds);
}

FeedbackFlow::FeedbackFlow(std::vector<Vector> anchors, Vector target, Matrix weight)
    : anchors_(std::move(anchors)), target_(std::move(target)), weight_(std::move(weight)) {
  if (anchors_.empty()) throw ValidationError("feedback flow needs anchors");
  for (const Vector& u : anchors_) {
    offsets_.push_back(u - target_);
    anchor_scale_ = std::max(anchor_scale_, offsets_.back().norm());
  }
}

bool FeedbackFlow::sliding_weights(const Vector& x, const std::vector<std::size_t>& active,
                                   Vector& w) const {
  const auto r = static_cast<Eigen::Index>(active.size());
  Matrix a(r, r);
  Vector b = Vector::Zero(r);
  const std::size_t k0 = active.front();
  for (Eigen::Index i = 1; i < r; ++i) {
    const Vector normal = weight_ * (anchors_[active[static_cast<std::size_t>(i)]] - anchors_[k0]);
    for (Eigen::Index j = 0; j < r; ++j)
      a(i - 1, j) = (anchors_[active[static_cast<std::size_t>(j)]] - x).dot(normal);
  }
  a.row(r - 1).setOnes();
  b[r - 1] = 1.0;
  const auto qr = a.colPivHouseholderQr();
  if (qr.rank() < r) return false;
  w = qr.solve(b);
  if (!w.allFinite() || (a * w - b).cwiseAbs().maxCoeff() > 1e-9) return false;
  if (w.minCoeff() < -1e-9) return false;
  w = w.cwiseMax(0.0);
  w /= w.sum();
  return true;
}

Vector FeedbackFlow::advance(Vector x, double duration) const {
  const double wnorm = std::max(weight_.cwiseAbs().maxCoeff(), 1e-300);
  const double rate_tol = 1e-10 * anchor_scale_ * anchor_scale_ * wnorm;
  const std::size_t n = anchors_.size();
  double rem = duration;
  std::size_t events = 0;
  std::vector<double> score(n);
  std::vector<std::size_t> forced;  // switches due immediately
  auto in = [](const std::vector<std::size_t>& set, std::size_t k) {
    return std::find(set.begin(), set.end(), k) != set.end();
  };

  while (rem > 0.0) {
    const Vector d = x - target_;
    const double dist = d.norm();
    if (dist <= 1e-14 * (1.0 + target_.norm())) return target_ + d * std::exp(-rem);
    if (++events > max_events)
      throw std::runtime_error("feedback flow exceeded the event budget");

    const Vector wd = weight_ * d;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      score[k] = wd.dot(offsets_[k]);
      best = std::min(best, score[k]);
    }
    // Scores carry round-off of order eps (|x| + |y|) on top of the
    // relative slack.
    const double tie_tol =
        anchor_scale_ * wnorm * (1e-10 * dist + 1e-14 * (1.0 + target_.norm() + x.norm()));
    std::vector<std::size_t> tied = forced;
    for (std::size_t k = 0; k < n; ++k)
      if (score[k] - best <= tie_tol && !in(tied, k)) tied.push_back(k);
    std::sort(tied.begin(), tied.end());

    // A pure action is admissible if no tied action overtakes it.
    std::vector<std::size_t> group;
    Vector w;
    for (std::size_t j : tied) {
      bool ok = true;
      for (std::size_t k : tied)
        if (k != j &&
            (anchors_[j] - x).dot(weight_ * (anchors_[k] - anchors_[j])) < -rate_tol) {
          ok = false;
          break;
        }
      if (ok) {
        group = {j};
        w = Vector::Ones(1);
        break;
      }
    }

    // Otherwise slide: the largest subset of the tie set whose convex
    // combination keeps it tied while the rest of the tie set falls behind.
    const std::size_t t = std::min<std::size_t>(tied.size(), 12);
    for (std::size_t size = t; group.empty() && size >= 2; --size) {
      std::vector<bool> mask(t, false);
      std::fill(mask.begin(), mask.begin() + static_cast<long>(size), true);
      do {
        std::vector<std::size_t> subset;
        for (std::size_t i = 0; i < t; ++i)
          if (mask[i]) subset.push_back(tied[i]);
        Vector ws;
        if (!sliding_weights(x, subset, ws)) continue;
        Vector v = -x;
        for (std::size_t j = 0; j < subset.size(); ++j)
          v += ws[static_cast<Eigen::Index>(j)] * anchors_[subset[j]];
        bool consistent = true;
        for (std::size_t k : tied)
          if (!in(subset, k) &&
              v.dot(weight_ * (anchors_[k] - anchors_[subset.front()])) < -rate_tol) {
            consistent = false;
            break;
          }
        if (consistent) {
          group = std::move(subset);
          w = std::move(ws);
          break;
        }
      } while (std::prev_permutation(mask.begin(), mask.end()));
    }

    if (group.empty()) {
      // No consistent Filippov selection; take a short arc and re-evaluate.
      const std::size_t j = tied.front();
      const double h = std::min(rem, 1e-6);
      x = anchors_[j] + (x - anchors_[j]) * std::exp(-h);
      rem -= h;
      continue;
    }

    if (group.size() > 1) {
      // Remove round-off drift off the switching surface.
      const auto r = static_cast<Eigen::Index>(group.size()) - 1;
      Matrix a(r, x.size());
      for (Eigen::Index i = 0; i < r; ++i)
        a.row(i) = (weight_ * (anchors_[group[static_cast<std::size_t>(i + 1)]] -
                               anchors_[group.front()]))
                       .transpose();
      x -= a.completeOrthogonalDecomposition().solve(a * (x - target_));
    }
    Vector pull = Vector::Zero(x.size());
    for (std::size_t j = 0; j < group.size(); ++j)
      pull += w[static_cast<Eigen::Index>(j)] * anchors_[group[j]];

    // Score gap between k and the group along the arc is c + d e^{-tau},
    // monotone in tau, so the next switch has a closed form.
    double horizon = rem;
    std::vector<std::size_t> imminent;
    for (std::size_t k = 0; k < n; ++k) {
      if (in(tied, k)) continue;
      const Vector normal = weight_ * (anchors_[k] - anchors_[group.front()]);
      const double c = (pull - target_).dot(normal);
      const double dd = (x - pull).dot(normal);
      if (!(c < 0.0 && dd > -c)) continue;
      const double tau = std::log(dd / -c);
      if (tau <= 1e-12) imminent.push_back(k);
      horizon = std::min(horizon, tau);
    }
    if (!imminent.empty()) {
      // Already on the surface up to round-off: treat as tied and reselect.
      forced = tied;
      forced.insert(forced.end(), imminent.begin(), imminent.end());
      continue;
    }
    forced.clear();
    x = pull + (x - pull) * std::exp(-horizon);
    rem -= horizon;
  }
  return x;
}

CostAccumulator::CostAccumulator(const CostSpec& spec, Vector y)
    : spec_(&spec), y_(std::move(y)) {}

void CostAccumulator::add_sample(double t, const Vector& x) {
  const double big_t = spec_->horizon;
  if (have_prev_) {
    const double span = std::min(t, big_t) - std::min(prev_t_, big_t);
    if (span > 0.0) {
      const Vector e = y_ - prev_x_;
      running_ += 0.5 * e.dot(spec_->Q * e) * span;
    }
  }
  if (!terminal_set_ && t >= big_t) {
    const Vector e = y_ - x;
    terminal_ = 0.5 * e.dot(spec_->S * e);
    terminal_set_ = true;
  }
  have_prev_ = true;
  prev_t_ = t;
  prev_x_ = x;
}

double CostAccumulator::total() const {
  if (!have_prev_) return 0.0;
  if (terminal_set_) return running_ + terminal_;
  const Vector e = y_ - prev_x_;
  return running_ + 0.5 * e.dot(spec_->S * e);
}

double evaluate_cost(const CostSpec& spec, std::span<const TimedState> trajectory,
                     const Vector& y) {
  spec.validate();
  if (trajectory.empty()) throw ValidationError("empty trajectory");
  CostAccumulator acc(spec, y);
  double last = -std::numeric_limits<double>::infinity();
  for (const TimedState& s : trajectory) {
    if (!(s.t > last)) throw ValidationError("trajectory times must increase");
    last = s.t;
    acc.add_sample(s.t, s.x);
  }
  return acc.total();
}

namespace {

Snapshot snapshot(std::size_t step, double s, const SimplexVector& q, const Vector& y,
                  const ParticleEnsemble& rho, const std::vector<CostAccumulator>& acc) {
  Snapshot snap{step, s, std::exp(s), q.weights(), y, mean_state(rho), 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double dist = (rho.position(i) - y).norm();
    snap.mean_distance += rho.weight(i) * dist;
    snap.max_distance = std::max(snap.max_distance, dist);
    snap.mean_cost += rho.weight(i) * acc[i].total();
  }
  return snap;
}

}  // namespace

SimulationRecord simulate_population(const VectorPayoffGame& game, const CostSpec& spec,
                                     const ParticleEnsemble& rho0,
                                     const PopulationMode& mode,
                                     const SimulationOptions& options,
                                     const StepObserver& observer) {
  spec.validate();
  if (spec.dim() != game.payoff_dim())
    throw ValidationError("cost matrices must be " + std::to_string(game.payoff_dim()) +
                          "x" + std::to_string(game.payoff_dim()));
  if (rho0.dim() != game.payoff_dim())
    throw ValidationError("ensemble dimension does not match the payoff dimension");
  if (!(options.ds > 0.0) || options.ds > 0.1 + 1e-12)
    throw ValidationError("ds must lie in (0, 0.1]");
  if (!(options.s_max > 0.0)) throw ValidationError("s_max must be positive");
  if (options.membership_check_stride == 0)
    throw ValidationError("membership check stride must be positive");

  const RiccatiTrajectory phi = riccati_solve(spec, options.riccati_steps);
  const PayoffPolytope x_poly = payoff_polytope(game);

  SimplexVector q = std::visit([](const auto& m) { return m.q; }, mode);
  if (q.size() != game.n_actions()) throw ValidationError("q must have one entry per action");
  Vector y;
  if (const auto* fixed = std::get_if<FixedTarget>(&mode)) {
    y = fixed->y;
    if (static_cast<std::size_t>(y.size()) != game.payoff_dim())
      throw ValidationError("target has the wrong dimension");
  } else {
    const auto& sc = std::get<SelfConfirming>(mode);
    if (sc.p.size() != game.n_actions())
      throw ValidationError("p must have one entry per action");
    y = game.bilinear_payoff(sc.p, q);
  }

  ParticleEnsemble rho = rho0;
  const double s0 = rho0.time();
  std::vector<CostAccumulator> acc;
  acc.reserve(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) acc.emplace_back(spec, y);

  SimulationRecord rec{{}, rho0, {}, 0.0, {}};
  rec.snapshots.push_back(snapshot(0, s0, q, y, rho, acc));

  const auto steps = static_cast<std::size_t>(std::ceil(options.s_max / options.ds - 1e-9));
  std::vector<std::size_t> actions(rho.size());
  double s = s0;
  for (std::size_t step = 1; step <= steps; ++step) {
    const double ds = std::min(options.ds, s0 + options.s_max - s);
    if (const auto* sc = std::get_if<SelfConfirming>(&mode)) {
      const auto cand = EquilibriumCandidate::from_mixture(game, sc->p, q);
      q = induced_density(game, rho, cand);
      y = game.bilinear_payoff(sc->p, q);
    }
    const double t = std::exp(s);
    const Matrix& weight = phi.at(t);
    const std::vector<Vector> anchors = game.anchors(q);
    const FeedbackFlow flow(anchors, y, weight);

    ParticleEnsemble before = rho;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      Vector& x = rho.positions()[i];
      acc[i].add_sample(t, x);
      acc[i].set_target(y);
      actions[i] = best_response(game, q, x, weight, y);
      x = flow.advance(x, ds);
    }
    s += ds;
    rho.set_time(s);
    if (step == 1) rec.initial_actions = actions;

    if (step % options.membership_check_stride == 0 || step == steps) {
      for (std::size_t i = 0; i < rho.size(); ++i)
        if (!x_poly.contains(rho.position(i)) &&
            x_poly.membership_residual(rho.position(i)) > options.membership_tolerance)
          throw std::runtime_error("particle " + std::to_string(i) +
                                   " left the payoff polytope at step " +
                                   std::to_string(step));
    }
    if (observer) observer(StepView{step, s - ds, ds, q, y, before, rho, actions});
    rec.snapshots.push_back(snapshot(step, s, q, y, rho, acc));
  }

  const double t_end = std::exp(s);
  rec.cost.resize(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    acc[i].add_sample(t_end, rho.position(i));
    rec.cost[i] = acc[i].total();
    rec.mean_cost += rho.weight(i) * rec.cost[i];
  }
  rec.snapshots.back().mean_cost = rec.mean_cost;
  rec.final_ensemble = std::move(rho);
  return rec;
}

}  // namespace popgame
