#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "popgame/types.hpp"

namespace popgame {

// A point of the probability simplex over actions.
class SimplexVector {
 public:
  static constexpr double kTolerance = 1e-12;

  // Throws ValidationError unless all weights are >= 0 and sum to 1
  // within kTolerance.
  explicit SimplexVector(Vector weights);

  static SimplexVector unit(std::size_t n, std::size_t k);
  static SimplexVector uniform(std::size_t n);
  // Clips round-off negatives and rescales; for internal arithmetic
  // (damped updates, re-projection) where drift is expected.
  static SimplexVector normalized(const Vector& weights);
  // Euclidean projection onto the simplex.
  static SimplexVector project(const Vector& point);

  const Vector& weights() const { return weights_; }
  std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
  double operator[](std::size_t i) const { return weights_[static_cast<Eigen::Index>(i)]; }

 private:
  struct Unchecked {};
  SimplexVector(Vector weights, Unchecked) : weights_(std::move(weights)) {}
  Vector weights_;
};

// Symmetric two-player game whose payoff for own action l against
// opponent action k is a vector M_lk in R^m.
class VectorPayoffGame {
 public:
  VectorPayoffGame(std::vector<std::string> action_names, std::size_t payoff_dim,
                   std::vector<std::vector<Vector>> payoffs);

  std::size_t n_actions() const { return names_.size(); }
  std::size_t payoff_dim() const { return dim_; }
  const std::vector<std::string>& action_names() const { return names_; }
  const Vector& payoff(std::size_t own, std::size_t opp) const {
    return payoffs_[own * names_.size() + opp];
  }

  // u(a, q) = sum_k q_k M_ak
  Vector mixed_payoff(std::size_t action, const SimplexVector& q) const;
  // sum_{l,k} p_l q_k M_lk
  Vector bilinear_payoff(const SimplexVector& p, const SimplexVector& q) const;
  // u(k, q) for every k.
  std::vector<Vector> anchors(const SimplexVector& q) const;

 private:
  std::vector<std::string> names_;
  std::size_t dim_;
  std::vector<Vector> payoffs_;  // row-major n x n
};

// Square symmetric game with scalar payoff pi(own, opp) to the row player.
struct ScalarGame {
  std::vector<std::string> action_names;
  Matrix payoff;
};

// Entry (l, k) becomes (pi(j, k) - pi(l, k))_j: the regret of not having
// played j.
VectorPayoffGame regret_transform(const ScalarGame& base);

}  // namespace popgame
