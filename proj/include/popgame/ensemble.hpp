#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "popgame/types.hpp"

namespace popgame {

class PayoffPolytope;
class RegionPartition;

// Weighted particle approximation of the population density over payoff
// space. Weights sum to one.
class ParticleEnsemble {
 public:
  static constexpr double kWeightTolerance = 1e-12;

  ParticleEnsemble(std::vector<Vector> positions, std::vector<double> weights,
                   double time = 0.0);
  // Equal weights.
  explicit ParticleEnsemble(std::vector<Vector> positions, double time = 0.0);

  std::size_t size() const { return positions_.size(); }
  std::size_t dim() const { return dim_; }
  double time() const { return time_; }
  void set_time(double s) { time_ = s; }

  const std::vector<Vector>& positions() const { return positions_; }
  std::vector<Vector>& positions() { return positions_; }
  const Vector& position(std::size_t i) const { return positions_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }

 private:
  std::vector<Vector> positions_;
  std::vector<double> weights_;
  std::size_t dim_ = 0;
  double time_ = 0.0;
};

Vector mean_state(const ParticleEnsemble& rho);

// Uniform doubles from a 64-bit engine without std distributions, so
// sampled ensembles are identical across standard library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Rejection sampling inside the bounding box of the polytope's affine hull
// (so segments and other flat polytopes are sampled w.r.t. their own
// dimension).
ParticleEnsemble sample_uniform(const PayoffPolytope& poly, std::size_t n,
                                std::uint64_t seed);

// Uniform over the polytope, conditioned so a fraction[k] of particles lands
// in region k of `part`.
ParticleEnsemble sample_stratified(const PayoffPolytope& poly,
                                   const RegionPartition& part,
                                   const std::vector<double>& fractions,
                                   std::size_t n, std::uint64_t seed);

// Regular grid with the given spacing, clipped to the polytope.
ParticleEnsemble sample_lattice(const PayoffPolytope& poly, double spacing);

}  // namespace popgame
