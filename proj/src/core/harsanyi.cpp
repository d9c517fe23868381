#include "popgame/harsanyi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "popgame/error.hpp"

namespace popgame {

HarsanyiGame::HarsanyiGame(std::vector<std::string> states, Vector prior,
                           std::array<TypeSpace, 2> types,
                           std::vector<std::string> actions,
                           std::vector<std::array<Matrix, 2>> payoffs)
    : states_(std::move(states)),
      prior_(std::move(prior)),
      types_(std::move(types)),
      actions_(std::move(actions)),
      payoffs_(std::move(payoffs)) {
  const std::size_t ns = states_.size();
  if (ns == 0) throw ValidationError("Harsanyi game has no states");
  if (static_cast<std::size_t>(prior_.size()) != ns)
    throw ValidationError("prior has " + std::to_string(prior_.size()) +
                          " entries for " + std::to_string(ns) + " states");
  if (!prior_.allFinite() || (prior_.array() < 0.0).any())
    throw ValidationError("prior has a negative or non-finite entry");
  if (std::abs(prior_.sum() - 1.0) > 1e-12)
    throw ValidationError("prior sums to " + std::to_string(prior_.sum()) + ", expected 1");
  for (std::size_t i = 0; i < 2; ++i) {
    const TypeSpace& ts = types_[i];
    if (ts.names.empty())
      throw ValidationError("player " + std::to_string(i) + " has no types");
    if (ts.of_state.size() != ns)
      throw ValidationError("player " + std::to_string(i) +
                            " type map does not cover every state");
    for (std::size_t t : ts.of_state)
      if (t >= ts.size())
        throw ValidationError("player " + std::to_string(i) + " type index out of range");
  }
  if (types_[0].size() != types_[1].size())
    throw ValidationError("both players need the same number of types");
  if (actions_.empty()) throw ValidationError("Harsanyi game has no actions");
  if (payoffs_.size() != ns)
    throw ValidationError("payoffs must be given for every state");
  const auto na = static_cast<Eigen::Index>(actions_.size());
  for (std::size_t w = 0; w < ns; ++w) {
    for (std::size_t i = 0; i < 2; ++i) {
      const Matrix& m = payoffs_[w][i];
      if (m.rows() != na || m.cols() != na)
        throw ValidationError("payoff matrix of state " + states_[w] + ", player " +
                              std::to_string(i) + " must be " + std::to_string(na) + "x" +
                              std::to_string(na));
      if (!m.allFinite())
        throw ValidationError("payoff matrix of state " + states_[w] + " is not finite");
    }
  }
}

Vector HarsanyiGame::type_probabilities(std::size_t player) const {
  const TypeSpace& ts = types(player);
  Vector mass = Vector::Zero(static_cast<Eigen::Index>(ts.size()));
  for (std::size_t w = 0; w < n_states(); ++w)
    mass[static_cast<Eigen::Index>(ts.of_state[w])] += prior_[static_cast<Eigen::Index>(w)];
  return mass;
}

std::vector<BayesianStrategy> enumerate_bayesian_strategies(const HarsanyiGame& h,
                                                            std::size_t player) {
  const std::size_t nt = h.types(player).size();
  const std::size_t na = h.n_actions();
  std::size_t count = 1;
  for (std::size_t i = 0; i < nt; ++i) count *= na;
  std::vector<BayesianStrategy> out;
  out.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    BayesianStrategy s{std::vector<std::size_t>(nt)};
    std::size_t rest = code;
    for (std::size_t t = nt; t-- > 0;) {
      s.assignment[t] = rest % na;
      rest /= na;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string strategy_label(const HarsanyiGame& h, std::size_t player,
                           const BayesianStrategy& s) {
  const TypeSpace& ts = h.types(player);
  std::string label;
  for (std::size_t t = 0; t < s.assignment.size(); ++t) {
    if (t) label += ' ';
    const std::string& action = h.actions().at(s.assignment[t]);
    label += action.empty() ? std::string("?") : action.substr(0, 1);
    label += '_';
    label += ts.names.at(t);
  }
  return label;
}

namespace {

void check_strategy(const HarsanyiGame& h, std::size_t player, const BayesianStrategy& s) {
  if (s.assignment.size() != h.types(player).size())
    throw ValidationError("strategy does not assign an action to every type");
  for (std::size_t a : s.assignment)
    if (a >= h.n_actions()) throw ValidationError("strategy action out of range");
}

}  // namespace

Vector bayesian_expected_payoffs(const HarsanyiGame& h, std::size_t player,
                                 const BayesianStrategy& own,
                                 const BayesianStrategy& opp) {
  if (player > 1) throw ValidationError("player must be 0 or 1");
  const std::size_t other = 1 - player;
  check_strategy(h, player, own);
  check_strategy(h, other, opp);
  const TypeSpace& mine = h.types(player);
  const TypeSpace& theirs = h.types(other);
  const auto nt = static_cast<Eigen::Index>(mine.size());
  Vector total = Vector::Zero(nt);
  Vector mass = Vector::Zero(nt);
  for (std::size_t w = 0; w < h.n_states(); ++w) {
    const double pr = h.prior()[static_cast<Eigen::Index>(w)];
    const std::size_t t = mine.of_state[w];
    const std::size_t a_own = own.assignment[t];
    const std::size_t a_opp = opp.assignment[theirs.of_state[w]];
    total[static_cast<Eigen::Index>(t)] += pr * h.payoff(w, player, a_own, a_opp);
    mass[static_cast<Eigen::Index>(t)] += pr;
  }
  for (Eigen::Index t = 0; t < nt; ++t) {
    if (!(mass[t] > 0.0))
      throw ValidationError("type " + mine.names[static_cast<std::size_t>(t)] +
                            " of player " + std::to_string(player) +
                            " has zero prior probability");
    total[t] /= mass[t];
  }
  return total;
}

double ex_ante_payoff(const HarsanyiGame& h, std::size_t player,
                      const BayesianStrategy& own, const BayesianStrategy& opp) {
  if (player > 1) throw ValidationError("player must be 0 or 1");
  check_strategy(h, player, own);
  check_strategy(h, 1 - player, opp);
  double total = 0.0;
  for (std::size_t w = 0; w < h.n_states(); ++w) {
    const std::size_t a_own = own.assignment[h.types(player).of_state[w]];
    const std::size_t a_opp = opp.assignment[h.types(1 - player).of_state[w]];
    total += h.prior()[static_cast<Eigen::Index>(w)] * h.payoff(w, player, a_own, a_opp);
  }
  return total;
}

VectorPayoffGame maximal_regret_game(const HarsanyiGame& h, std::size_t player) {
  const auto own = enumerate_bayesian_strategies(h, player);
  const auto opp = enumerate_bayesian_strategies(h, 1 - player);
  if (own.size() != opp.size())
    throw ValidationError("maximal-regret game needs a common strategy set");
  const std::size_t n = own.size();
  const std::size_t m = h.types(player).size();

  std::vector<std::string> names;
  names.reserve(n);
  for (const auto& s : own) names.push_back(strategy_label(h, player, s));

  std::vector<std::vector<Vector>> table(n, std::vector<Vector>(n));
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<Vector> value(n);
    Vector best = Vector::Constant(static_cast<Eigen::Index>(m),
                                   -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < n; ++k) {
      value[k] = bayesian_expected_payoffs(h, player, own[k], opp[c]);
      best = best.cwiseMax(value[k]);
    }
    for (std::size_t r = 0; r < n; ++r) table[r][c] = best - value[r];
  }
  return VectorPayoffGame(std::move(names), m, std::move(table));
}

}  // namespace popgame
