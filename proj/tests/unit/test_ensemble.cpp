#include <doctest.h>

#include <cmath>

#include "popgame/approachability.hpp"
#include "popgame/ensemble.hpp"
#include "popgame/error.hpp"
#include "popgame/polytope.hpp"
#include "popgame/scenario.hpp"

using namespace popgame;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

}  // namespace

TEST_CASE("ensemble invariants") {
  CHECK_NOTHROW(ParticleEnsemble({v2(0, 0), v2(1, 1)}, {0.25, 0.75}));
  CHECK_THROWS_AS(ParticleEnsemble({v2(0, 0), v2(1, 1)}, {0.25, 0.7}), ValidationError);
  CHECK_THROWS_AS(ParticleEnsemble({v2(0, 0), v2(1, 1)}, {1.25, -0.25}), ValidationError);
  CHECK_THROWS_AS(ParticleEnsemble({v2(0, 0)}, {0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(ParticleEnsemble(std::vector<Vector>{}), ValidationError);
  CHECK_THROWS_AS(ParticleEnsemble({v2(0, 0), Vector::Zero(3)}), ValidationError);
}

TEST_CASE("mean state") {
  CHECK(mean_state(ParticleEnsemble({v2(3, -1)})) == v2(3, -1));
  CHECK(mean_state(ParticleEnsemble({v2(0, 0), v2(2, 2)})) == v2(1, 1));
  CHECK(mean_state(ParticleEnsemble({v2(0, 0), v2(4, 0)}, {0.75, 0.25})) == v2(1, 0));
}

TEST_CASE("uniform sample over the PD polytope") {
  const PayoffPolytope x = payoff_polytope(prisoners_dilemma_payoffs());
  const std::size_t n = 20000;
  const ParticleEnsemble rho = sample_uniform(x, n, 3);
  CHECK(rho.size() == n);
  for (const auto& p : rho.positions()) CHECK(x.contains(p));
  // The square has side 2*sqrt(2): each coordinate has variance 2/3.
  const double sigma = std::sqrt((2.0 / 3.0) / static_cast<double>(n));
  const Vector m = mean_state(rho);
  CHECK(std::abs(m[0] - 2.0) < 3 * sigma);
  CHECK(std::abs(m[1] - 2.0) < 3 * sigma);
}

TEST_CASE("uniform sample over a segment") {
  const PayoffPolytope seg = payoff_polytope(regret_transform(prisoners_dilemma_scalar()));
  const ParticleEnsemble rho = sample_uniform(seg, 5000, 1);
  double lo = 1, hi = 0;
  for (const auto& p : rho.positions()) {
    CHECK(seg.contains(p));
    lo = std::min(lo, p[1]);
    hi = std::max(hi, p[1]);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("sampling is deterministic in the seed") {
  const PayoffPolytope x = payoff_polytope(prisoners_dilemma_payoffs());
  const auto a = sample_uniform(x, 100, 42), b = sample_uniform(x, 100, 42), c = sample_uniform(x, 100, 43);
  CHECK(a.positions() == b.positions());
  CHECK(a.positions() != c.positions());
  Rng r1(5), r2(5);
  for (int i = 0; i < 10; ++i) {
    const double u = r1.uniform();
    CHECK(u == r2.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("stratified sample hits the requested region fractions") {
  const VectorPayoffGame g = regret_transform(coordination_scalar());
  const SimplexVector q(v2(2.0 / 3.0, 1.0 / 3.0));
  const PayoffPolytope x = payoff_polytope(g);
  const auto part = RegionPartition::from_game(g, q, v2(0, -1));
  const ParticleEnsemble rho = sample_stratified(x, part, {2.0 / 3.0, 1.0 / 3.0}, 3000, 7);
  std::size_t first = 0;
  for (const auto& p : rho.positions()) {
    CHECK(x.contains(p));
    if (part.assign(p) == 0) ++first;
  }
  CHECK(first == 2000);
  CHECK_THROWS_AS(sample_stratified(x, part, {0.5, 0.4}, 10, 1), ValidationError);
  CHECK_THROWS_AS(sample_stratified(x, part, {1.0}, 10, 1), ValidationError);
}

TEST_CASE("lattice sample") {
  // Unequal sides pin the principal frame to the axes.
  const PayoffPolytope square({v2(0, 0), v2(2, 0), v2(2, 1), v2(0, 1)});
  const ParticleEnsemble rho = sample_lattice(square, 0.25);
  CHECK(rho.size() == 45);
  for (const auto& p : rho.positions()) CHECK(square.contains(p));
  const Vector m = mean_state(rho);
  CHECK(m[0] == doctest::Approx(1.0));
  CHECK(m[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(sample_lattice(square, 0.0), ValidationError);
  CHECK_THROWS_AS(sample_lattice(square, 1e-5), ValidationError);
}
