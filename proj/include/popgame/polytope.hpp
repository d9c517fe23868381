#pragma once

#include <optional>
#include <vector>

#include "popgame/types.hpp"

namespace popgame {

class VectorPayoffGame;

// Convex hull of a finite point list. Points closer than kDedupTolerance
// are merged; membership is a feasibility problem over combination weights.
class PayoffPolytope {
 public:
  static constexpr double kDedupTolerance = 1e-12;
  static constexpr double kResidualTolerance = 1e-9;

  explicit PayoffPolytope(const std::vector<Vector>& points);

  const std::vector<Vector>& vertices() const { return vertices_; }
  std::size_t dim() const { return dim_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  bool contains(const Vector& x) const;
  // Nonnegative weights summing to one with sum_i w_i v_i = x, if x is
  // inside; nullopt otherwise.
  std::optional<Vector> convex_weights(const Vector& x) const;
  // Max-abs residual of the best nonnegative fit of [V; 1] w = [x; 1].
  double membership_residual(const Vector& x) const;

 private:
  Vector fit(const Vector& x) const;
  void build_edges();

  std::size_t dim_ = 0;
  std::vector<Vector> vertices_;
  Matrix system_;  // (dim + 1) x vertices, last row all ones
  Vector lower_, upper_;
  Matrix edge_normals_;  // 2-D only: outward unit normals of the hull edges
  Vector edge_offsets_;
};

PayoffPolytope payoff_polytope(const VectorPayoffGame& game);

// Vertices that are not convex combinations of the others.
std::vector<Vector> extreme_points(const PayoffPolytope& poly);

// Lawson-Hanson: argmin_{w >= 0} |A w - b|.
Vector nonnegative_least_squares(const Matrix& a, const Vector& b);

}  // namespace popgame
