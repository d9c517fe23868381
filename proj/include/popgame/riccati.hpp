#pragma once

#include <cstddef>
#include <vector>

#include "popgame/types.hpp"

namespace popgame {

// Quadratic running weight Q, terminal weight S and horizon T.
struct CostSpec {
  Matrix Q;
  Matrix S;
  double horizon = 1.0;

  // Symmetric positive definite Q and S of equal size, T > 0.
  void validate() const;
  std::size_t dim() const { return static_cast<std::size_t>(Q.rows()); }

  static CostSpec identity(std::size_t m, double horizon);
};

// Phi on a uniform grid over [0, T] solving Phi' = Phi - Q, Phi_T = S.
class RiccatiTrajectory {
 public:
  RiccatiTrajectory(std::vector<double> times, std::vector<Matrix> values);

  const std::vector<double>& times() const { return times_; }
  const std::vector<Matrix>& values() const { return values_; }
  // Nearest grid point, t clipped to the grid.
  const Matrix& at(double t) const;
  // Largest |Phi' - Phi + Q| (max norm) at interval midpoints, estimated
  // with four-point stencils on the stored values.
  double residual(const Matrix& Q) const;

 private:
  std::vector<double> times_;
  std::vector<Matrix> values_;
};

// Backward RK4.
RiccatiTrajectory riccati_solve(const CostSpec& spec, std::size_t grid_steps = 1000);

// Q + exp(t - T) (S - Q)
Matrix riccati_closed_form(const CostSpec& spec, double t);

}  // namespace popgame
