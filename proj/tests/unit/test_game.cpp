#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "popgame/error.hpp"
#include "popgame/game.hpp"
#include "popgame/polytope.hpp"
#include "popgame/scenario.hpp"

using namespace popgame;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

void check_table(const VectorPayoffGame& g, const std::vector<std::vector<Vector>>& expected) {
  REQUIRE(g.n_actions() == expected.size());
  for (std::size_t l = 0; l < expected.size(); ++l)
    for (std::size_t k = 0; k < expected.size(); ++k) {
      INFO("entry " << l << "," << k);
      CHECK(g.payoff(l, k) == expected[l][k]);
    }
}

}  // namespace

TEST_CASE("simplex vector invariants") {
  CHECK_NOTHROW(SimplexVector(v2(0.25, 0.75)));
  CHECK_THROWS_AS(SimplexVector(v2(0.5, 0.4)), ValidationError);
  CHECK_THROWS_AS(SimplexVector(v2(1.5, -0.5)), ValidationError);
  CHECK_THROWS_AS(SimplexVector(Vector(0)), ValidationError);
  CHECK(SimplexVector::unit(3, 1).weights() == (Vector(3) << 0, 1, 0).finished());
  CHECK(SimplexVector::uniform(4).weights().sum() == doctest::Approx(1.0));
  CHECK_THROWS_AS(SimplexVector::unit(2, 2), ValidationError);
}

TEST_CASE("simplex projection is the nearest simplex point") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 4);
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = 2.0 * n01(rng);
    const Vector p = SimplexVector::project(v).weights();
    const double d = (p - v).norm();
    for (int j = 0; j < 100; ++j) {
      const Vector z = oracle::random_simplex(n, rng);
      CHECK(d <= (z - v).norm() + 1e-12);
    }
  }
}

TEST_CASE("mixed payoff matches the PD caption anchors") {
  const VectorPayoffGame g = prisoners_dilemma_payoffs();
  const SimplexVector half(v2(0.5, 0.5));
  CHECK(g.mixed_payoff(0, half) == v2(1.5, 3.5));
  CHECK(g.mixed_payoff(1, half) == v2(2.5, 0.5));
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t k = 0; k < 2; ++k) CHECK(g.mixed_payoff(a, SimplexVector::unit(2, k)) == g.payoff(a, k));
  CHECK_THROWS_AS(g.mixed_payoff(2, half), ValidationError);
  CHECK_THROWS_AS(g.mixed_payoff(0, SimplexVector::uniform(3)), ValidationError);
}

TEST_CASE("mixed payoff is linear in q and stays in X") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5, 5), unit01(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 3), m = 1 + static_cast<std::size_t>(trial % 3);
    std::vector<std::vector<Vector>> pay(n, std::vector<Vector>(n));
    std::vector<Vector> all;
    for (auto& row : pay)
      for (auto& e : row) {
        e = Vector(static_cast<Eigen::Index>(m));
        for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = u(rng);
        all.push_back(e);
      }
    const VectorPayoffGame g(std::vector<std::string>(n, "a"), m, pay);
    const SimplexVector q1(oracle::random_simplex(n, rng)), q2(oracle::random_simplex(n, rng));
    const double alpha = unit01(rng);
    const SimplexVector mix = SimplexVector::normalized(alpha * q1.weights() + (1 - alpha) * q2.weights());
    const PayoffPolytope x = payoff_polytope(g);
    for (std::size_t a = 0; a < n; ++a) {
      const Vector lhs = g.mixed_payoff(a, mix);
      const Vector rhs = alpha * g.mixed_payoff(a, q1) + (1 - alpha) * g.mixed_payoff(a, q2);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * (1 + rhs.cwiseAbs().maxCoeff()));
      CHECK(x.contains(g.mixed_payoff(a, q1)));
      CHECK(oracle::distance_to_hull(all, g.mixed_payoff(a, q1)) < 1e-9);
    }
    // bilinear = sum_l p_l u(l, q)
    const SimplexVector p(oracle::random_simplex(n, rng));
    Vector manual = Vector::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t l = 0; l < n; ++l) manual += p[l] * g.mixed_payoff(l, q1);
    CHECK((g.bilinear_payoff(p, q1) - manual).norm() < 1e-12);
  }
}

TEST_CASE("game validation") {
  std::vector<std::vector<Vector>> ok = {{v2(0, 0), v2(1, 1)}, {v2(2, 2), v2(3, 3)}};
  CHECK_NOTHROW(VectorPayoffGame({"a", "b"}, 2, ok));
  auto ragged = ok;
  ragged[1].pop_back();
  CHECK_THROWS_AS(VectorPayoffGame({"a", "b"}, 2, ragged), ValidationError);
  auto wrong_dim = ok;
  wrong_dim[0][1] = Vector::Ones(3);
  CHECK_THROWS_AS(VectorPayoffGame({"a", "b"}, 2, wrong_dim), ValidationError);
  auto nonfinite = ok;
  nonfinite[0][0][0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(VectorPayoffGame({"a", "b"}, 2, nonfinite), ValidationError);
  CHECK_THROWS_AS(VectorPayoffGame({}, 2, {}), ValidationError);
}

TEST_CASE("regret tables of the scalar examples") {
  check_table(regret_transform(prisoners_dilemma_scalar()),
              {{v2(0, 1), v2(0, 1)}, {v2(-1, 0), v2(-1, 0)}});
  check_table(regret_transform(coordination_scalar()),
              {{v2(0, -2), v2(0, 1)}, {v2(2, 0), v2(-1, 0)}});
  check_table(regret_transform(hawk_dove_scalar()),
              {{v2(0, 1), v2(0, -2)}, {v2(-1, 0), v2(2, 0)}});
}

TEST_CASE("regret transform: own component zero, Nash regrets nonpositive") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pay(-5, 5);
  int nash_seen = 0;
  for (int trial = 0; trial < 500; ++trial) {
    ScalarGame base{{"a", "b"}, Matrix(2, 2)};
    for (int i = 0; i < 4; ++i) base.payoff(i / 2, i % 2) = pay(rng);
    const VectorPayoffGame r = regret_transform(base);
    for (std::size_t l = 0; l < 2; ++l)
      for (std::size_t k = 0; k < 2; ++k) CHECK(r.payoff(l, k)[static_cast<Eigen::Index>(l)] == 0.0);
    // brute-force pure Nash of the symmetric game: (l, k) with row and column best replies
    for (int l = 0; l < 2; ++l)
      for (int k = 0; k < 2; ++k) {
        const bool row_ok = base.payoff(l, k) >= base.payoff(1 - l, k);
        const bool col_ok = base.payoff(k, l) >= base.payoff(1 - k, l);
        if (!(row_ok && col_ok)) continue;
        ++nash_seen;
        CHECK((r.payoff(static_cast<std::size_t>(l), static_cast<std::size_t>(k)).array() <= 0).all());
        CHECK((r.payoff(static_cast<std::size_t>(k), static_cast<std::size_t>(l)).array() <= 0).all());
      }
  }
  CHECK(nash_seen > 100);
}

TEST_CASE("scalar game validation") {
  ScalarGame bad{{"a", "b"}, Matrix(2, 3)};
  bad.payoff.setZero();
  CHECK_THROWS_AS(regret_transform(bad), ValidationError);
}
