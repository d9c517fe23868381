#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "popgame/approachability.hpp"
#include "popgame/ensemble.hpp"
#include "popgame/equilibrium.hpp"
#include "popgame/error.hpp"
#include "popgame/polytope.hpp"
#include "popgame/scenario.hpp"
#include "popgame/simulation.hpp"

using namespace popgame;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

const SimplexVector kHalf(v2(0.5, 0.5));

struct RandomGame {
  VectorPayoffGame game;
  SimplexVector q;
  Vector y;
};

// Random game, random q and a random target inside T(q).
RandomGame random_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3, 3);
  std::uniform_int_distribution<int> ni(2, 4), mi(1, 3);
  const auto n = static_cast<std::size_t>(ni(rng));
  const auto m = static_cast<std::size_t>(mi(rng));
  std::vector<std::vector<Vector>> pay(n, std::vector<Vector>(n));
  for (auto& row : pay)
    for (auto& e : row) {
      e = Vector(static_cast<Eigen::Index>(m));
      for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = u(rng);
    }
  VectorPayoffGame g(std::vector<std::string>(n, "a"), m, pay);
  SimplexVector q(oracle::random_simplex(n, rng));
  const SimplexVector p(oracle::random_simplex(n, rng));
  Vector y = g.bilinear_payoff(p, q);
  return {std::move(g), std::move(q), std::move(y)};
}

}  // namespace

TEST_CASE("best response agrees with the region partition for Phi = I") {
  const VectorPayoffGame g = regret_transform(prisoners_dilemma_scalar());
  const PayoffPolytope x = payoff_polytope(g);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const Matrix eye = Matrix::Identity(2, 2);
  for (int i = 0; i < 10000; ++i) {
    const SimplexVector q(oracle::random_simplex(2, rng));
    const Vector y = v2(u(rng), u(rng)), pt = v2(u(rng), u(rng));
    const auto part = RegionPartition::from_game(g, q, y);
    const std::size_t a = best_response(g, q, pt, eye, y);
    // Equal up to exact ties, which the scores resolve identically.
    if (a != region_assign(part, pt))
      CHECK(std::abs(part.score(pt, a) - part.score(pt, region_assign(part, pt))) < 1e-12);
    CHECK(best_response(g, q, pt, 3.0 * eye, y) == a);
  }
  (void)x;
}

TEST_CASE("best response examples") {
  const VectorPayoffGame pd = prisoners_dilemma_payoffs();
  const Matrix eye = Matrix::Identity(2, 2);
  CHECK(best_response(pd, kHalf, v2(2, 2), eye, v2(2, 2)) == 0);
  CHECK(best_response(pd, kHalf, v2(1, 1), eye, v2(2, 2)) == 0);
  CHECK(best_response(pd, kHalf, v2(2, 3), eye, v2(2, 2)) == 1);
}

TEST_CASE("step agent") {
  const VectorPayoffGame g = regret_transform(prisoners_dilemma_scalar());
  const Vector u0 = g.mixed_payoff(0, kHalf);
  CHECK(step_agent(g, u0, 0, kHalf, 0.1) == u0);
  CHECK((step_agent(g, v2(-1, 0), 1, kHalf, 50.0) - g.mixed_payoff(1, kHalf)).norm() < 1e-20 + 1e-15);
  const Vector y = v2(-0.5, 0.5), x = v2(-1, 0);
  const std::size_t a = region_assign(RegionPartition::from_game(g, kHalf, y), x);
  const Vector next = step_agent(g, x, a, kHalf, 0.1);
  CHECK((next - y).norm() < (x - y).norm());
  CHECK_THROWS_AS(step_agent(g, x, a, kHalf, 0.0), ValidationError);
}

TEST_CASE("feedback flow contracts at rate one and matches a fine hold-flow") {
  std::mt19937_64 rng(31);
  int compared = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const RandomGame rg = random_instance(rng);
    const auto anchors = rg.game.anchors(rg.q);
    const PayoffPolytope xp = payoff_polytope(rg.game);
    const ParticleEnsemble start = sample_uniform(xp, 2, static_cast<std::uint64_t>(trial) + 1);
    const auto m = static_cast<Eigen::Index>(rg.game.payoff_dim());
    const Matrix eye = Matrix::Identity(m, m);
    const FeedbackFlow flow(anchors, rg.y, eye);
    for (const Vector& x0 : start.positions()) {
      Vector x = x0;
      for (int step = 0; step < 30; ++step) {
        const Vector next = flow.advance(x, 0.1);
        CHECK((next - rg.y).norm() <= std::exp(-0.1) * (x - rg.y).norm() * (1 + 1e-6) + 1e-12);
        CHECK(xp.membership_residual(next) < 1e-9);
        x = next;
      }
      // Sample-and-hold with a tiny hold time chatters along the same path.
      const Vector ref = oracle::hold_flow(anchors, rg.y, eye, x0, 3.0, 1e-4);
      CHECK((ref - x).norm() < 2e-3 * (1 + (x0 - rg.y).norm()));
      ++compared;
    }
  }
  CHECK(compared == 200);
}

TEST_CASE("supporting hyperplane along simulated runs") {
  const VectorPayoffGame g = regret_transform(coordination_scalar());
  const SimplexVector q(v2(2.0 / 3.0, 1.0 / 3.0));
  const Vector y = v2(0, -1);
  const PayoffPolytope xp = payoff_polytope(g);
  const ParticleEnsemble rho = sample_uniform(xp, 300, 5);
  std::size_t steps_seen = 0;
  const auto observer = [&](const StepView& v) {
    ++steps_seen;
    for (std::size_t i = 0; i < v.before.size(); ++i) {
      const Vector& x = v.before.position(i);
      const Vector u = g.mixed_payoff(v.actions[i], v.q);
      CHECK((x - y).dot(u - y) <= 1e-9);
      CHECK(blackwell_step_condition(x, {y}, drift(g, v.actions[i], v.q, x, 1.0)));
    }
  };
  const auto rec = simulate_population(g, CostSpec::identity(2, 10.0), rho, FixedTarget{q, y}, {}, observer);
  CHECK(steps_seen == 100);
  CHECK(rec.snapshots.size() == 101);
  for (std::size_t i = 1; i < rec.snapshots.size(); ++i) CHECK(rec.snapshots[i].s > rec.snapshots[i - 1].s);
  CHECK(rec.snapshots.back().max_distance < 1e-3);
}

TEST_CASE("PD regret run collapses onto the target") {
  const VectorPayoffGame g = regret_transform(prisoners_dilemma_scalar());
  const ParticleEnsemble rho = sample_uniform(payoff_polytope(g), 500, 1);
  const Vector y = v2(-0.5, 0.5);
  const auto rec = simulate_population(g, CostSpec::identity(2, 10.0), rho, FixedTarget{kHalf, y});
  for (const auto& x : rec.final_ensemble.positions()) CHECK((x - y).norm() < 1e-3);
  CHECK(rec.cost.size() == 500);
  CHECK(rec.mean_cost > 0.0);
}

TEST_CASE("self-confirming mode re-estimates q") {
  const VectorPayoffGame pd = prisoners_dilemma_payoffs();
  const ParticleEnsemble rho = sample_uniform(payoff_polytope(pd), 400, 2);
  const auto rec = simulate_population(pd, CostSpec::identity(2, 10.0), rho, SelfConfirming{kHalf, kHalf},
                                       {.s_max = 1.0, .ds = 0.1});
  CHECK(rec.snapshots.size() == 11);
  for (const auto& s : rec.snapshots) CHECK(s.q.sum() == doctest::Approx(1.0).epsilon(1e-12));
  const SimplexVector expected = induced_density(pd, rho, EquilibriumCandidate::from_mixture(pd, kHalf, kHalf));
  CHECK(rec.snapshots[1].q == expected.weights());
}

TEST_CASE("simulation validation") {
  const VectorPayoffGame pd = prisoners_dilemma_payoffs();
  const ParticleEnsemble rho = sample_uniform(payoff_polytope(pd), 10, 2);
  const CostSpec spec = CostSpec::identity(2, 10.0);
  CHECK_THROWS_AS(simulate_population(pd, spec, rho, FixedTarget{kHalf, v2(2, 2)}, {.s_max = 1.0, .ds = 0.2}),
                  ValidationError);
  CHECK_THROWS_AS(simulate_population(pd, CostSpec::identity(3, 1.0), rho, FixedTarget{kHalf, v2(2, 2)}),
                  ValidationError);
  CHECK_THROWS_AS(simulate_population(pd, spec, rho, FixedTarget{kHalf, Vector::Zero(3)}), ValidationError);
}

TEST_CASE("evaluate cost") {
  const CostSpec spec = CostSpec::identity(2, 1.0);
  const Vector y = v2(1, 2), x = v2(2, 0);
  std::vector<TimedState> at_target{{0.0, y}, {0.5, y}, {1.0, y}};
  CHECK(evaluate_cost(spec, at_target, y) == 0.0);
  std::vector<TimedState> constant{{0.0, x}, {0.25, x}, {0.5, x}, {1.0, x}};
  CHECK(evaluate_cost(spec, constant, y) == doctest::Approx((y - x).squaredNorm()).epsilon(1e-14));

  // Pointwise closer trajectory costs strictly less.
  std::vector<TimedState> closer = constant;
  for (auto& s : closer) s.x = y + 0.5 * (s.x - y);
  CHECK(evaluate_cost(spec, closer, y) < evaluate_cost(spec, constant, y));
  CostSpec weighted{(Matrix(2, 2) << 2, 0.5, 0.5, 1).finished(), Matrix::Identity(2, 2) * 3, 1.0};
  CHECK(evaluate_cost(weighted, closer, y) < evaluate_cost(weighted, constant, y));

  std::vector<TimedState> unordered{{1.0, x}, {0.5, x}};
  CHECK_THROWS_AS(evaluate_cost(spec, unordered, y), ValidationError);
  CHECK_THROWS_AS(evaluate_cost(spec, std::vector<TimedState>{}, y), ValidationError);
}
