#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "popgame/equilibrium.hpp"
#include "popgame/game.hpp"
#include "popgame/harsanyi.hpp"
#include "popgame/riccati.hpp"
#include "popgame/types.hpp"

namespace popgame {

class ParticleEnsemble;
class PayoffPolytope;

enum class ScenarioMode {
  fixed_target,
  self_confirming,
  equilibrium_solve,
  target_set_report,
  bayesian_report,
};

const char* to_string(ScenarioMode mode);

struct DensitySpec {
  enum class Kind { uniform, stratified, lattice, points };
  Kind kind = Kind::uniform;
  std::size_t particles = 2000;
  std::vector<double> fractions;  // stratified
  double spacing = 0.05;          // lattice
  std::vector<Vector> points;     // points
  std::vector<double> weights;    // points (optional)
};

struct Scenario {
  std::string name;
  ScenarioMode mode = ScenarioMode::fixed_target;
  std::optional<VectorPayoffGame> game;
  std::optional<HarsanyiGame> harsanyi;
  std::optional<SimplexVector> p;
  std::optional<SimplexVector> q;
  std::optional<Vector> y;  // pins the target
  DensitySpec density;
  CostSpec cost;
  double s_max = 10.0;
  double ds = 0.1;
  std::uint64_t seed = 1;
  FlowParameters solver;
  std::vector<SimplexVector> report_q;
  // Largest |q - q~| still reported as self-confirmed.
  double confirm_tol = 0.02;

  const VectorPayoffGame& vector_game() const;
  // Target implied by (p, q) or the pinned y.
  Vector target() const;
  EquilibriumCandidate candidate() const;
  void validate() const;
};

struct BuiltinParams {
  double a = -1.0;  // parametric game
  double b = 2.0;
};

std::vector<std::string> builtin_scenario_names();
bool is_builtin_scenario(const std::string& name);
Scenario builtin_scenario(const std::string& name, const BuiltinParams& params = {});

// Built-in name or path to a scenario file.
Scenario load_scenario(const std::string& name_or_path, const BuiltinParams& params = {});
Scenario scenario_from_json(const nlohmann::json& doc, const std::string& base_dir);

// Game argument of `report target-sets`: builtin scenario name or a game /
// scenario file.
VectorPayoffGame load_game(const std::string& name_or_path);
HarsanyiGame load_harsanyi(const std::string& name_or_path);

// Builtin example games.
ScalarGame prisoners_dilemma_scalar();
VectorPayoffGame prisoners_dilemma_payoffs();
ScalarGame coordination_scalar();
ScalarGame hawk_dove_scalar();
VectorPayoffGame parametric_regret_game(double a, double b);
HarsanyiGame bayesian_battle_of_sexes();

ParticleEnsemble initial_ensemble(const Scenario& s);

// Runs the scenario in its configured mode. Writes trajectory.csv and
// summary.json (plus solver_log.csv / target_sets.json where relevant) into
// out_dir when given. Returns the summary.
nlohmann::json run_scenario(const Scenario& s, const std::optional<std::string>& out_dir);

// Fixed-point solve from the scenario's candidate; writes solver_log.csv.
// Throws NoConvergence after writing the partial log.
nlohmann::json solve_equilibrium(const Scenario& s, const std::optional<std::string>& out_dir);

nlohmann::json target_set_report(const VectorPayoffGame& game,
                                 const std::vector<SimplexVector>& qs);

struct BayesianProfile {
  std::size_t row;
  std::size_t col;
};

struct PureTargetCheck {
  std::size_t q_index;            // pure q = e_{q_index}
  std::vector<Vector> target_vertices;
  bool origin_approachable;
  std::optional<std::size_t> bang_bang_action;  // action whose anchor is y
  Vector induced_q;
  bool self_confirmed;
};

struct BayesianReport {
  std::vector<std::string> strategy_labels;
  std::vector<BayesianProfile> nash_profiles;          // brute force, expected game
  std::vector<BayesianProfile> nonpositive_regret_profiles;  // both players
  bool jensen_verified = true;  // nonpositive regret => Nash, for all profiles
  std::vector<PureTargetCheck> pure_q;
};

BayesianReport bayesian_report(const HarsanyiGame& h, std::uint64_t seed = 1,
                               std::size_t particles = 4000);
nlohmann::json to_json(const HarsanyiGame& h, const BayesianReport& r);

// Pure Bayesian profiles where neither player gains by a unilateral
// deviation in the ex-ante expected game.
std::vector<BayesianProfile> expected_game_nash_profiles(const HarsanyiGame& h);

}  // namespace popgame
