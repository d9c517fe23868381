#include "popgame/approachability.hpp"

#include <cmath>
#include <limits>

#include "popgame/error.hpp"

namespace popgame {

StateDrift drift(const VectorPayoffGame& game, std::size_t action,
                 const SimplexVector& q, const Vector& x, double t) {
  if (!(t > 0.0)) throw ValidationError("drift needs a positive time");
  if (static_cast<std::size_t>(x.size()) != game.payoff_dim())
    throw ValidationError("state dimension does not match the payoff dimension");
  return {(game.mixed_payoff(action, q) - x) / t, t};
}

ProjectedValue expected_projected_value(const VectorPayoffGame& game,
                                        const SimplexVector& q, const Vector& x,
                                        const Vector& lambda) {
  if (lambda.size() != x.size() ||
      static_cast<std::size_t>(x.size()) != game.payoff_dim())
    throw ValidationError("lambda, x and the payoff dimension must agree");
  if (std::abs(lambda.norm() - 1.0) > 1e-9) throw ValidationError("lambda must be a unit vector");
  ProjectedValue best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t a = 0; a < game.n_actions(); ++a) {
    const double v = lambda.dot(game.mixed_payoff(a, q) - x);
    if (v < best.value) best = {v, a};
  }
  return best;
}

bool blackwell_step_condition(const Vector& x, const Target& y, const StateDrift& d) {
  if (x.size() != y.y.size() || d.value.size() != x.size())
    throw ValidationError("dimension mismatch in Blackwell condition");
  const Vector e = x - y.y;
  return e.dot(e + d.value) <= 1e-9;
}

PayoffPolytope target_set(const VectorPayoffGame& game, const SimplexVector& q) {
  return PayoffPolytope(game.anchors(q));
}

bool is_approachable(const Target& y, const VectorPayoffGame& game,
                     const SimplexVector& q) {
  return target_set(game, q).contains(y.y);
}

RegionPartition::RegionPartition(Target target, std::vector<Vector> anchors)
    : target_(std::move(target)), anchors_(std::move(anchors)) {
  if (anchors_.empty()) throw ValidationError("region partition needs anchors");
  offsets_.reserve(anchors_.size());
  for (const Vector& u : anchors_) {
    if (u.size() != target_.y.size())
      throw ValidationError("anchor dimension does not match the target");
    offsets_.push_back(u - target_.y);
  }
}

RegionPartition RegionPartition::from_game(const VectorPayoffGame& game,
                                           const SimplexVector& q, const Vector& y) {
  return RegionPartition(Target{y}, game.anchors(q));
}

double RegionPartition::score(const Vector& x, std::size_t k) const {
  return (x - target_.y).dot(offsets_.at(k));
}

std::size_t RegionPartition::assign(const Vector& x) const {
  if (x.size() != target_.y.size())
    throw ValidationError("state dimension does not match the target");
  const Vector d = x - target_.y;
  std::size_t best = 0;
  double best_score = d.dot(offsets_[0]);
  for (std::size_t k = 1; k < offsets_.size(); ++k) {
    const double s = d.dot(offsets_[k]);
    if (s < best_score) {
      best_score = s;
      best = k;
    }
  }
  return best;
}

Vector orthant_projection(const Vector& x) { return x.cwiseMin(0.0); }

}  // namespace popgame
