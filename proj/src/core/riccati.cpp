#include "popgame/riccati.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "popgame/error.hpp"

namespace popgame {

namespace {

void check_spd(const Matrix& a, const char* name) {
  if (a.rows() == 0 || a.rows() != a.cols())
    throw ValidationError(std::string(name) + " must be a nonempty square matrix");
  if (!a.allFinite()) throw ValidationError(std::string(name) + " is not finite");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ValidationError(std::string(name) + " is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0))
    throw ValidationError(std::string(name) + " is not positive definite");
}

// Lagrange weights for the value and first derivative at x of the
// polynomial through nodes 0, 1, 2, 3.
void cubic_weights(double x, double value[4], double slope[4]) {
  for (int i = 0; i < 4; ++i) {
    double denom = 1.0;
    for (int j = 0; j < 4; ++j)
      if (j != i) denom *= static_cast<double>(i - j);
    double v = 1.0;
    for (int j = 0; j < 4; ++j)
      if (j != i) v *= x - j;
    double d = 0.0;
    for (int k = 0; k < 4; ++k) {
      if (k == i) continue;
      double term = 1.0;
      for (int j = 0; j < 4; ++j)
        if (j != i && j != k) term *= x - j;
      d += term;
    }
    value[i] = v / denom;
    slope[i] = d / denom;
  }
}

}  // namespace

void CostSpec::validate() const {
  check_spd(Q, "Q");
  check_spd(S, "S");
  if (Q.rows() != S.rows()) throw ValidationError("Q and S sizes differ");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ValidationError("horizon T must be positive");
}

CostSpec CostSpec::identity(std::size_t m, double horizon) {
  const auto n = static_cast<Eigen::Index>(m);
  return {Matrix::Identity(n, n), Matrix::Identity(n, n), horizon};
}

RiccatiTrajectory::RiccatiTrajectory(std::vector<double> times, std::vector<Matrix> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() < 2 || times_.size() != values_.size())
    throw ValidationError("Riccati trajectory needs matching times and values");
}

const Matrix& RiccatiTrajectory::at(double t) const {
  const double t0 = times_.front();
  const double t1 = times_.back();
  const double c = std::clamp(t, t0, t1);
  const double h = (t1 - t0) / static_cast<double>(times_.size() - 1);
  const auto k = static_cast<std::size_t>(std::llround((c - t0) / h));
  return values_[std::min(k, values_.size() - 1)];
}

double RiccatiTrajectory::residual(const Matrix& Q) const {
  const std::size_t n = times_.size();
  const double h = (times_.back() - times_.front()) / static_cast<double>(n - 1);
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    Matrix value, slope;
    if (n >= 4) {
      const std::size_t j = std::clamp<std::size_t>(k == 0 ? 0 : k - 1, 0, n - 4);
      double wv[4], ws[4];
      cubic_weights(static_cast<double>(k - j) + 0.5, wv, ws);
      value = Matrix::Zero(Q.rows(), Q.cols());
      slope = Matrix::Zero(Q.rows(), Q.cols());
      for (int i = 0; i < 4; ++i) {
        value += wv[i] * values_[j + static_cast<std::size_t>(i)];
        slope += ws[i] * values_[j + static_cast<std::size_t>(i)];
      }
      slope /= h;
    } else {
      value = 0.5 * (values_[k] + values_[k + 1]);
      slope = (values_[k + 1] - values_[k]) / h;
    }
    worst = std::max(worst, (slope - value + Q).cwiseAbs().maxCoeff());
  }
  return worst;
}

RiccatiTrajectory riccati_solve(const CostSpec& spec, std::size_t grid_steps) {
  spec.validate();
  if (grid_steps < 2) throw ValidationError("Riccati grid needs at least 2 steps");
  const double big_t = spec.horizon;
  const double h = big_t / static_cast<double>(grid_steps);
  std::vector<double> times(grid_steps + 1);
  for (std::size_t k = 0; k <= grid_steps; ++k)
    times[k] = big_t * static_cast<double>(k) / static_cast<double>(grid_steps);
  std::vector<Matrix> values(grid_steps + 1);
  values[grid_steps] = spec.S;
  auto f = [&](const Matrix& phi) -> Matrix { return phi - spec.Q; };
  const double dt = -h;
  for (std::size_t k = grid_steps; k-- > 0;) {
    const Matrix& phi = values[k + 1];
    const Matrix k1 = f(phi);
    const Matrix k2 = f(phi + 0.5 * dt * k1);
    const Matrix k3 = f(phi + 0.5 * dt * k2);
    const Matrix k4 = f(phi + dt * k3);
    Matrix next = phi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    values[k] = 0.5 * (next + next.transpose());
  }
  return RiccatiTrajectory(std::move(times), std::move(values));
}

Matrix riccati_closed_form(const CostSpec& spec, double t) {
  return spec.Q + std::exp(t - spec.horizon) * (spec.S - spec.Q);
}

}  // namespace popgame
