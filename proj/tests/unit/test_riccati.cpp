#include <doctest.h>

#include <cmath>
#include <random>

#include "popgame/error.hpp"
#include "popgame/riccati.hpp"

using namespace popgame;

namespace {

Matrix random_spd(Eigen::Index m, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Matrix a(m, m);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n01(rng);
  return a * a.transpose() + 0.1 * Matrix::Identity(m, m);
}

double min_eig(const Matrix& a) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(a).eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("stationary solution") {
  const CostSpec spec = CostSpec::identity(3, 2.0);
  const RiccatiTrajectory r = riccati_solve(spec, 100);
  for (const Matrix& phi : r.values()) CHECK((phi - spec.Q).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(r.times().front() == 0.0);
  CHECK(r.times().back() == 2.0);
}

TEST_CASE("scalar example") {
  CostSpec spec{Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 2.0), 1.0};
  const RiccatiTrajectory r = riccati_solve(spec, 1000);
  CHECK(std::abs(r.values().front()(0, 0) - (1.0 + std::exp(-1.0))) < 1e-9);
  CHECK(r.values().back()(0, 0) == 2.0);
  CHECK(r.residual(spec.Q) <= 1e-6);
  CHECK(riccati_closed_form(spec, 0.0)(0, 0) == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("random SPD pairs match the convex-combination form") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> horizon(0.5, 5.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index m = 1 + trial % 4;
    CostSpec spec{random_spd(m, rng), random_spd(m, rng), horizon(rng)};
    const RiccatiTrajectory r = riccati_solve(spec, 500);
    for (std::size_t i = 0; i < r.times().size(); ++i) {
      const double w = std::exp(r.times()[i] - spec.horizon);
      const Matrix expected = (1 - w) * spec.Q + w * spec.S;
      const Matrix& phi = r.values()[i];
      CHECK((phi - expected).cwiseAbs().maxCoeff() < 1e-6);
      CHECK((phi - phi.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(min_eig(phi) > 0.0);
    }
    CHECK(r.residual(spec.Q) <= 1e-6);
  }
}

TEST_CASE("nearest-grid lookup clips to the horizon") {
  CostSpec spec{Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 3.0), 1.0};
  const RiccatiTrajectory r = riccati_solve(spec, 10);
  CHECK(&r.at(-5.0) == &r.values().front());
  CHECK(&r.at(50.0) == &r.values().back());
  CHECK(&r.at(0.31) == &r.values()[3]);
  CHECK(&r.at(0.36) == &r.values()[4]);
}

TEST_CASE("cost spec validation") {
  CostSpec nonsym{Matrix::Identity(2, 2), Matrix::Identity(2, 2), 1.0};
  nonsym.Q(0, 1) = 0.5;
  CHECK_THROWS_AS(nonsym.validate(), ValidationError);
  CostSpec indefinite{Matrix::Identity(2, 2), -Matrix::Identity(2, 2), 1.0};
  CHECK_THROWS_AS(indefinite.validate(), ValidationError);
  CostSpec sizes{Matrix::Identity(2, 2), Matrix::Identity(3, 3), 1.0};
  CHECK_THROWS_AS(sizes.validate(), ValidationError);
  CostSpec horizon{Matrix::Identity(2, 2), Matrix::Identity(2, 2), 0.0};
  CHECK_THROWS_AS(horizon.validate(), ValidationError);
  CHECK_THROWS_AS(riccati_solve(CostSpec::identity(2, 1.0), 1), ValidationError);
  CHECK_THROWS_AS(riccati_solve(indefinite), ValidationError);
}
