#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "popgame/game.hpp"
#include "popgame/types.hpp"

namespace popgame {

// One player's information partition: type index for every state.
struct TypeSpace {
  std::vector<std::string> names;
  std::vector<std::size_t> of_state;

  std::size_t size() const { return names.size(); }
};

// Two-player game of incomplete information over a finite state set with a
// common prior and a state-independent action set. payoffs[w][i] is player
// i's matrix in state w, row = own action, column = opponent action.
class HarsanyiGame {
 public:
  HarsanyiGame(std::vector<std::string> states, Vector prior,
               std::array<TypeSpace, 2> types, std::vector<std::string> actions,
               std::vector<std::array<Matrix, 2>> payoffs);

  std::size_t n_states() const { return states_.size(); }
  std::size_t n_actions() const { return actions_.size(); }
  const std::vector<std::string>& states() const { return states_; }
  const Vector& prior() const { return prior_; }
  const TypeSpace& types(std::size_t player) const { return types_.at(player); }
  const std::vector<std::string>& actions() const { return actions_; }
  double payoff(std::size_t state, std::size_t player, std::size_t own,
                std::size_t opp) const {
    return payoffs_[state][player](static_cast<Eigen::Index>(own),
                                   static_cast<Eigen::Index>(opp));
  }
  // Prior mass of each of the player's types.
  Vector type_probabilities(std::size_t player) const;

 private:
  std::vector<std::string> states_;
  Vector prior_;
  std::array<TypeSpace, 2> types_;
  std::vector<std::string> actions_;
  std::vector<std::array<Matrix, 2>> payoffs_;
};

// Pure strategy measurable w.r.t. own type: assignment[type] = action.
struct BayesianStrategy {
  std::vector<std::size_t> assignment;

  bool operator==(const BayesianStrategy&) const = default;
};

// All |B|^|T_i| assignments, lexicographic with type 0 most significant.
std::vector<BayesianStrategy> enumerate_bayesian_strategies(const HarsanyiGame& h,
                                                            std::size_t player);

// "O_l F_h" style label.
std::string strategy_label(const HarsanyiGame& h, std::size_t player,
                           const BayesianStrategy& s);

// Component t: E[payoff of `player` | own type t] when `player` uses `own`
// and the opponent uses `opp`.
Vector bayesian_expected_payoffs(const HarsanyiGame& h, std::size_t player,
                                 const BayesianStrategy& own,
                                 const BayesianStrategy& opp);

// Unconditional E_theta of the player's payoff.
double ex_ante_payoff(const HarsanyiGame& h, std::size_t player,
                      const BayesianStrategy& own, const BayesianStrategy& opp);

// Vector-payoff game over Sigma x Sigma whose entry is, per own type, the
// best deviation gain over all pure Bayesian strategies.
VectorPayoffGame maximal_regret_game(const HarsanyiGame& h, std::size_t player = 0);

}  // namespace popgame
