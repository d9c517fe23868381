#pragma once

#include <cstddef>
#include <vector>

#include "popgame/game.hpp"
#include "popgame/polytope.hpp"
#include "popgame/types.hpp"

namespace popgame {

struct Target {
  Vector y;
};

// f(u(a,q), x) = (u(a,q) - x) / t
struct StateDrift {
  Vector value;
  double time;
};

struct ProjectedValue {
  double value;
  std::size_t action;
};

StateDrift drift(const VectorPayoffGame& game, std::size_t action,
                 const SimplexVector& q, const Vector& x, double t);

// min_a lambda^T (u(a,q) - x) and its argmin (lowest index on ties).
ProjectedValue expected_projected_value(const VectorPayoffGame& game,
                                        const SimplexVector& q, const Vector& x,
                                        const Vector& lambda);

// Blackwell condition for the singleton target {y}:
// (x - y)^T (x - y + d) <= 1e-9. With d taken at t = 1 this is
// (x - y)^T (u - y) <= 1e-9.
bool blackwell_step_condition(const Vector& x, const Target& y, const StateDrift& d);

// T(q) = conv{u(l, q) : l in A}
PayoffPolytope target_set(const VectorPayoffGame& game, const SimplexVector& q);

bool is_approachable(const Target& y, const VectorPayoffGame& game,
                     const SimplexVector& q);

// Bang-bang assignment of states to actions around a target. Action k is
// picked by argmin_k (x - y)^T (u(k,q) - y), lowest index on exact ties.
class RegionPartition {
 public:
  RegionPartition(Target target, std::vector<Vector> anchors);
  static RegionPartition from_game(const VectorPayoffGame& game,
                                   const SimplexVector& q, const Vector& y);

  const Target& target() const { return target_; }
  const std::vector<Vector>& anchors() const { return anchors_; }
  std::size_t assign(const Vector& x) const;
  // (x - y)^T (u(k,q) - y)
  double score(const Vector& x, std::size_t k) const;

 private:
  Target target_;
  std::vector<Vector> anchors_;
  std::vector<Vector> offsets_;  // anchors - y
};

inline std::size_t region_assign(const RegionPartition& part, const Vector& x) {
  return part.assign(x);
}

// Projection on the nonpositive orthant.
Vector orthant_projection(const Vector& x);

}  // namespace popgame
