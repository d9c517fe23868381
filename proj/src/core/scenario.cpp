#include "popgame/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "popgame/approachability.hpp"
#include "popgame/ensemble.hpp"
#include "popgame/error.hpp"
#include "popgame/io.hpp"
#include "popgame/polytope.hpp"
#include "popgame/simulation.hpp"

namespace popgame {

using nlohmann::json;
namespace fs = std::filesystem;

const char* to_string(ScenarioMode mode) {
  switch (mode) {
    case ScenarioMode::fixed_target: return "fixed_target";
    case ScenarioMode::self_confirming: return "self_confirming";
    case ScenarioMode::equilibrium_solve: return "equilibrium_solve";
    case ScenarioMode::target_set_report: return "target_set_report";
    case ScenarioMode::bayesian_report: return "bayesian_report";
  }
  return "unknown";
}

namespace {

ScenarioMode mode_from_string(const std::string& s) {
  for (auto m : {ScenarioMode::fixed_target, ScenarioMode::self_confirming,
                 ScenarioMode::equilibrium_solve, ScenarioMode::target_set_report,
                 ScenarioMode::bayesian_report})
    if (s == to_string(m)) return m;
  throw ValidationError("unknown mode '" + s + "'");
}

bool needs_simulation_inputs(ScenarioMode m) {
  return m == ScenarioMode::fixed_target || m == ScenarioMode::self_confirming ||
         m == ScenarioMode::equilibrium_solve;
}

}  // namespace

const VectorPayoffGame& Scenario::vector_game() const {
  if (!game) throw ValidationError("scenario '" + name + "' has no vector-payoff game");
  return *game;
}

Vector Scenario::target() const {
  if (y) return *y;
  if (!p || !q) throw ValidationError("scenario '" + name + "' needs p and q (or y)");
  return vector_game().bilinear_payoff(*p, *q);
}

EquilibriumCandidate Scenario::candidate() const {
  if (!q) throw ValidationError("scenario '" + name + "' needs q");
  if (y) return EquilibriumCandidate::with_target(p.value_or(*q), *q, *y);
  if (!p) throw ValidationError("scenario '" + name + "' needs p (or y)");
  return EquilibriumCandidate::from_mixture(vector_game(), *p, *q);
}

void Scenario::validate() const {
  if (mode == ScenarioMode::bayesian_report) {
    if (!harsanyi) throw ValidationError("bayesian_report needs a Harsanyi game");
    return;
  }
  const VectorPayoffGame& g = vector_game();
  const std::size_t n = g.n_actions();
  const std::size_t m = g.payoff_dim();
  for (const SimplexVector& r : report_q)
    if (r.size() != n) throw ValidationError("report_q entries need " + std::to_string(n) + " weights");
  if (!needs_simulation_inputs(mode)) return;
  if (!q) throw ValidationError("mode " + std::string(to_string(mode)) + " needs q");
  if (q->size() != n) throw ValidationError("q needs " + std::to_string(n) + " weights");
  if (p && p->size() != n) throw ValidationError("p needs " + std::to_string(n) + " weights");
  if (!p && !y) throw ValidationError("scenario needs p or a pinned y");
  if (mode == ScenarioMode::self_confirming && (!p || y))
    throw ValidationError("self_confirming mode needs p and no pinned y");
  if (y && static_cast<std::size_t>(y->size()) != m)
    throw ValidationError("y needs " + std::to_string(m) + " components");
  cost.validate();
  if (cost.dim() != m)
    throw ValidationError("cost matrices must be " + std::to_string(m) + "x" + std::to_string(m));
  if (!(s_max > 0.0)) throw ValidationError("s_max must be positive");
  if (!(ds > 0.0) || ds > 0.1 + 1e-12) throw ValidationError("ds must lie in (0, 0.1]");
  if (!(confirm_tol >= 0.0)) throw ValidationError("confirm_tol must be nonnegative");
  solver.validate();
  const DensitySpec& d = density;
  switch (d.kind) {
    case DensitySpec::Kind::uniform:
    case DensitySpec::Kind::stratified:
      if (d.particles == 0) throw ValidationError("density needs a positive particle count");
      if (d.kind == DensitySpec::Kind::stratified && d.fractions.size() != n)
        throw ValidationError("stratified density needs " + std::to_string(n) + " fractions");
      break;
    case DensitySpec::Kind::lattice:
      if (!(d.spacing > 0.0)) throw ValidationError("lattice spacing must be positive");
      break;
    case DensitySpec::Kind::points:
      if (d.points.empty()) throw ValidationError("explicit density has no points");
      if (!d.weights.empty() && d.weights.size() != d.points.size())
        throw ValidationError("explicit density needs one weight per point");
      for (const Vector& x : d.points)
        if (static_cast<std::size_t>(x.size()) != m)
          throw ValidationError("density points need " + std::to_string(m) + " components");
      break;
  }
}

// ---------------------------------------------------------------------------
// Built-in games and scenarios

ScalarGame prisoners_dilemma_scalar() {
  Matrix pay(2, 2);
  pay << 3, 0, 4, 1;
  return {{"Cooperate", "Defect"}, pay};
}

VectorPayoffGame prisoners_dilemma_payoffs() {
  const ScalarGame pd = prisoners_dilemma_scalar();
  std::vector<std::vector<Vector>> table(2, std::vector<Vector>(2));
  for (Eigen::Index l = 0; l < 2; ++l)
    for (Eigen::Index k = 0; k < 2; ++k)
      table[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] =
          (Vector(2) << pd.payoff(l, k), pd.payoff(k, l)).finished();
  return VectorPayoffGame(pd.action_names, 2, std::move(table));
}

ScalarGame coordination_scalar() {
  Matrix pay(2, 2);
  pay << 2, 0, 0, 1;
  return {{"Mozart", "Mahler"}, pay};
}

ScalarGame hawk_dove_scalar() {
  Matrix pay(2, 2);
  pay << -1, 4, 0, 2;
  return {{"Hawk", "Dove"}, pay};
}

VectorPayoffGame parametric_regret_game(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw ValidationError("parametric game needs finite a and b");
  auto v = [](double x0, double x1) { return (Vector(2) << x0, x1).finished(); };
  return VectorPayoffGame({"Top", "Bottom"}, 2,
                          {{v(0, a), v(0, b)}, {v(-a, 0), v(-b, 0)}});
}

HarsanyiGame bayesian_battle_of_sexes() {
  Matrix low(2, 2), high(2, 2);
  low << 3, 1, 0, 2;
  high << 1, 3, 2, 0;
  // States ll, lh, hl, hh: (row type, column type).
  std::vector<std::array<Matrix, 2>> pay;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) pay.push_back({r == 0 ? low : high, c == 0 ? low : high});
  return HarsanyiGame({"ll", "lh", "hl", "hh"}, Vector::Constant(4, 0.25),
                      {TypeSpace{{"l", "h"}, {0, 0, 1, 1}}, TypeSpace{{"l", "h"}, {0, 1, 0, 1}}},
                      {"Opera", "Football"}, std::move(pay));
}

std::vector<std::string> builtin_scenario_names() {
  return {"pd_payoff", "pd_regret", "coordination", "hawk_dove", "parametric", "bayesian_bos"};
}

bool is_builtin_scenario(const std::string& name) {
  const auto names = builtin_scenario_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Scenario builtin_scenario(const std::string& name, const BuiltinParams& params) {
  Scenario s;
  s.name = name;
  s.mode = ScenarioMode::fixed_target;
  s.cost = CostSpec::identity(2, 10.0);
  const SimplexVector half = SimplexVector::uniform(2);
  if (name == "pd_payoff") {
    s.game = prisoners_dilemma_payoffs();
    s.p = half;
    s.q = half;
    s.density.particles = 10000;
  } else if (name == "pd_regret") {
    s.game = regret_transform(prisoners_dilemma_scalar());
    s.p = half;
    s.q = half;
  } else if (name == "coordination") {
    s.game = regret_transform(coordination_scalar());
    s.p = SimplexVector::unit(2, 0);
    s.q = SimplexVector(Vector::Map(std::array<double, 2>{2.0 / 3.0, 1.0 / 3.0}.data(), 2));
    s.density.kind = DensitySpec::Kind::stratified;
    s.density.fractions = {2.0 / 3.0, 1.0 / 3.0};
  } else if (name == "hawk_dove") {
    s.game = regret_transform(hawk_dove_scalar());
    s.p = half;
    s.q = SimplexVector(Vector::Map(std::array<double, 2>{2.0 / 3.0, 1.0 / 3.0}.data(), 2));
  } else if (name == "parametric") {
    s.game = parametric_regret_game(params.a, params.b);
    // a < 0 < b: everybody on Top, target (0, a); otherwise everybody on
    // Bottom, target (-b, 0).
    const std::size_t k = params.a < 0.0 ? 0 : 1;
    s.p = SimplexVector::unit(2, k);
    s.q = SimplexVector::unit(2, k);
  } else if (name == "bayesian_bos") {
    s.mode = ScenarioMode::bayesian_report;
    s.harsanyi = bayesian_battle_of_sexes();
    s.game = maximal_regret_game(*s.harsanyi);
    s.density.particles = 4000;
  } else {
    throw ValidationError("unknown built-in scenario '" + name + "'");
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Scenario files

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
  const fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (fs::path(base_dir) / p).string();
}

std::string parent_dir(const std::string& path) {
  return fs::path(path).parent_path().string();
}

const json& field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ValidationError(std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& v, const char* key) {
  if (!v.is_number()) throw ValidationError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::size_t count(const json& v, const char* key) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ValidationError(std::string("field '") + key + "' must be a nonnegative integer");
  return v.get<std::size_t>();
}

void reject_unknown(const json& doc, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ValidationError("unknown field '" + it.key() + "' in " + where);
  }
}

json load_referenced(const std::string& base_dir, const json& node, const char* key) {
  if (!node.is_string()) throw ValidationError(std::string("field '") + key + "' must be a path");
  const std::string path = resolve(base_dir, node.get<std::string>());
  if (!fs::exists(path))
    throw IoError(std::string("file referenced by '") + key + "' not found: " + path);
  return io::read_json_file(path);
}

// Fills game (and harsanyi when the game is a maximal-regret transform).
void load_game_source(const json& g, const std::string& base_dir, Scenario& s) {
  if (!g.is_object() || g.size() != 1)
    throw ValidationError("field 'game' must hold exactly one source");
  const std::string kind = g.begin().key();
  const json& v = g.begin().value();
  if (kind == "inline") {
    s.game = io::game_from_json(v);
  } else if (kind == "file") {
    s.game = io::game_from_json(load_referenced(base_dir, v, "file"));
  } else if (kind == "regret_of") {
    s.game = regret_transform(io::scalar_game_from_json(v));
  } else if (kind == "regret_of_file") {
    s.game = regret_transform(io::scalar_game_from_json(load_referenced(base_dir, v, kind.c_str())));
  } else if (kind == "max_regret_of") {
    s.harsanyi = io::harsanyi_from_json(v);
    s.game = maximal_regret_game(*s.harsanyi);
  } else if (kind == "max_regret_of_file") {
    s.harsanyi = io::harsanyi_from_json(load_referenced(base_dir, v, kind.c_str()));
    s.game = maximal_regret_game(*s.harsanyi);
  } else if (kind == "builtin") {
    if (!v.is_string()) throw ValidationError("field 'builtin' must be a scenario name");
    const Scenario b = builtin_scenario(v.get<std::string>());
    s.game = b.game;
    s.harsanyi = b.harsanyi;
  } else {
    throw ValidationError("unknown game source '" + kind + "'");
  }
}

DensitySpec density_from_json(const json& d) {
  reject_unknown(d, {"kind", "particles", "fractions", "spacing", "points", "weights"}, "density");
  DensitySpec spec;
  const std::string kind = d.value("kind", std::string("uniform"));
  if (kind == "uniform") spec.kind = DensitySpec::Kind::uniform;
  else if (kind == "stratified") spec.kind = DensitySpec::Kind::stratified;
  else if (kind == "lattice") spec.kind = DensitySpec::Kind::lattice;
  else if (kind == "points") spec.kind = DensitySpec::Kind::points;
  else throw ValidationError("unknown density kind '" + kind + "'");
  if (d.contains("particles")) spec.particles = count(d["particles"], "particles");
  if (d.contains("spacing")) spec.spacing = number(d["spacing"], "spacing");
  if (d.contains("fractions")) {
    const Vector f = io::vector_from_json(d["fractions"], "fractions");
    spec.fractions.assign(f.data(), f.data() + f.size());
  }
  if (d.contains("points")) {
    if (!d["points"].is_array()) throw ValidationError("field 'points' must be an array");
    for (const json& x : d["points"]) spec.points.push_back(io::vector_from_json(x, "points"));
  }
  if (d.contains("weights")) {
    const Vector w = io::vector_from_json(d["weights"], "weights");
    spec.weights.assign(w.data(), w.data() + w.size());
  }
  return spec;
}

}  // namespace

Scenario scenario_from_json(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw ValidationError("scenario must be a JSON object");
  reject_unknown(doc,
                 {"name", "mode", "game", "p", "q", "y", "density", "cost", "s_max", "ds",
                  "seed", "solver", "report_q", "confirm_tol"},
                 "scenario");
  Scenario s;
  s.name = doc.value("name", std::string("scenario"));
  s.mode = mode_from_string(doc.value("mode", std::string("fixed_target")));
  load_game_source(field(doc, "game"), base_dir, s);
  if (doc.contains("p")) s.p = io::simplex_from_json(doc["p"], "p");
  if (doc.contains("q")) s.q = io::simplex_from_json(doc["q"], "q");
  if (doc.contains("y")) s.y = io::vector_from_json(doc["y"], "y");
  if (doc.contains("density")) s.density = density_from_json(doc["density"]);
  const std::size_t m = s.game ? s.game->payoff_dim() : 2;
  s.cost = CostSpec::identity(m, 10.0);
  if (doc.contains("cost")) {
    const json& c = doc["cost"];
    reject_unknown(c, {"Q", "S", "T"}, "cost");
    if (c.contains("Q")) s.cost.Q = io::matrix_from_json(c["Q"], "Q");
    if (c.contains("S")) s.cost.S = io::matrix_from_json(c["S"], "S");
    if (c.contains("T")) s.cost.horizon = number(c["T"], "T");
  }
  if (doc.contains("s_max")) s.s_max = number(doc["s_max"], "s_max");
  if (doc.contains("ds")) s.ds = number(doc["ds"], "ds");
  if (doc.contains("seed")) s.seed = count(doc["seed"], "seed");
  if (doc.contains("confirm_tol")) s.confirm_tol = number(doc["confirm_tol"], "confirm_tol");
  if (doc.contains("solver")) {
    const json& v = doc["solver"];
    reject_unknown(v, {"eta", "tol", "max_iter", "kappa"}, "solver");
    if (v.contains("eta")) s.solver.step = number(v["eta"], "eta");
    if (v.contains("tol")) s.solver.tol = number(v["tol"], "tol");
    if (v.contains("max_iter")) s.solver.max_iter = count(v["max_iter"], "max_iter");
    if (v.contains("kappa")) s.solver.kappa = number(v["kappa"], "kappa");
  }
  if (doc.contains("report_q")) {
    if (!doc["report_q"].is_array()) throw ValidationError("field 'report_q' must be an array");
    for (const json& q : doc["report_q"]) s.report_q.push_back(io::simplex_from_json(q, "report_q"));
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& name_or_path, const BuiltinParams& params) {
  if (is_builtin_scenario(name_or_path)) return builtin_scenario(name_or_path, params);
  if (!fs::exists(name_or_path))
    throw IoError("no built-in scenario or file named '" + name_or_path + "'");
  return scenario_from_json(io::read_json_file(name_or_path), parent_dir(name_or_path));
}

VectorPayoffGame load_game(const std::string& name_or_path) {
  if (is_builtin_scenario(name_or_path)) return builtin_scenario(name_or_path).vector_game();
  if (!fs::exists(name_or_path)) throw IoError("no built-in game or file named '" + name_or_path + "'");
  const json doc = io::read_json_file(name_or_path);
  if (!doc.is_object()) throw ValidationError(name_or_path + ": expected a JSON object");
  if (doc.contains("game")) return scenario_from_json(doc, parent_dir(name_or_path)).vector_game();
  if (doc.contains("states")) return maximal_regret_game(io::harsanyi_from_json(doc));
  if (doc.contains("payoff_dim")) return io::game_from_json(doc);
  return regret_transform(io::scalar_game_from_json(doc));
}

HarsanyiGame load_harsanyi(const std::string& name_or_path) {
  if (name_or_path == "bayesian_bos") return bayesian_battle_of_sexes();
  if (!fs::exists(name_or_path)) throw IoError("no Harsanyi game file named '" + name_or_path + "'");
  const json doc = io::read_json_file(name_or_path);
  if (doc.is_object() && doc.contains("game")) {
    Scenario s = scenario_from_json(doc, parent_dir(name_or_path));
    if (!s.harsanyi) throw ValidationError(name_or_path + " does not describe a Harsanyi game");
    return *s.harsanyi;
  }
  return io::harsanyi_from_json(doc);
}

// ---------------------------------------------------------------------------
// Running

ParticleEnsemble initial_ensemble(const Scenario& s) {
  const VectorPayoffGame& g = s.vector_game();
  const PayoffPolytope x = payoff_polytope(g);
  const DensitySpec& d = s.density;
  switch (d.kind) {
    case DensitySpec::Kind::uniform:
      return sample_uniform(x, d.particles, s.seed);
    case DensitySpec::Kind::stratified: {
      if (!s.q) throw ValidationError("stratified density needs q");
      const RegionPartition part = RegionPartition::from_game(g, *s.q, s.target());
      return sample_stratified(x, part, d.fractions, d.particles, s.seed);
    }
    case DensitySpec::Kind::lattice:
      return sample_lattice(x, d.spacing);
    case DensitySpec::Kind::points:
      for (std::size_t i = 0; i < d.points.size(); ++i)
        if (!x.contains(d.points[i]))
          throw ValidationError("density point " + std::to_string(i) + " lies outside X");
      if (d.weights.empty()) return ParticleEnsemble(d.points);
      return ParticleEnsemble(d.points, d.weights);
  }
  throw ValidationError("unsupported density");
}

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

std::ofstream open_output(const std::string& dir, const std::string& file) {
  ensure_dir(dir);
  const std::string path = (fs::path(dir) / file).string();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

void write_json(const std::optional<std::string>& dir, const std::string& file, const json& doc) {
  if (!dir) return;
  std::ofstream out = open_output(*dir, file);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("error while writing " + file);
}

json simplex_json(const SimplexVector& q) { return io::to_json(q.weights()); }

json run_population(const Scenario& s, const std::optional<std::string>& out_dir) {
  const VectorPayoffGame& g = s.vector_game();
  const ParticleEnsemble rho0 = initial_ensemble(s);
  const EquilibriumCandidate cand = s.candidate();
  const SimplexVector q_tilde = induced_density(g, rho0, cand);
  const EstimateError err = estimate_error(cand.q, q_tilde);
  const double nu_inf = err.nu.lpNorm<Eigen::Infinity>();

  PopulationMode mode = s.mode == ScenarioMode::self_confirming
                            ? PopulationMode(SelfConfirming{*s.p, *s.q})
                            : PopulationMode(FixedTarget{*s.q, cand.y});
  SimulationOptions opts;
  opts.s_max = s.s_max;
  opts.ds = s.ds;

  std::ofstream csv;
  if (out_dir) {
    csv = open_output(*out_dir, "trajectory.csv");
    csv << "step,s,t,particle_id";
    for (std::size_t j = 0; j < g.payoff_dim(); ++j) csv << ",x_" << j + 1;
    csv << ",action\n";
  }
  auto write_rows = [&](std::size_t step, double s_now, const ParticleEnsemble& rho,
                        std::span<const std::size_t> actions) {
    const std::string prefix = std::to_string(step) + "," + io::format9(s_now) + "," +
                               io::format9(std::exp(s_now)) + ",";
    for (std::size_t i = 0; i < rho.size(); ++i) {
      csv << prefix << i;
      const Vector& x = rho.position(i);
      for (Eigen::Index j = 0; j < x.size(); ++j) csv << ',' << io::format9(x[j]);
      csv << ',' << actions[i] << '\n';
    }
  };
  StepObserver observer;
  if (out_dir)
    observer = [&](const StepView& v) { write_rows(v.step - 1, v.s, v.before, v.actions); };

  SimulationRecord rec = simulate_population(g, s.cost, rho0, mode, opts, observer);
  const Snapshot& last = rec.snapshots.back();
  const SimplexVector q_final = SimplexVector::normalized(last.q);
  if (out_dir) {
    const RiccatiTrajectory phi = riccati_solve(s.cost, opts.riccati_steps);
    std::vector<std::size_t> final_actions(rec.final_ensemble.size());
    for (std::size_t i = 0; i < final_actions.size(); ++i)
      final_actions[i] = best_response(g, q_final, rec.final_ensemble.position(i),
                                       phi.at(last.t), last.y);
    write_rows(last.step, last.s, rec.final_ensemble, final_actions);
    if (!csv) throw IoError("error while writing trajectory.csv");
  }

  // Per initial region: its mass, the anchor it first plays toward and the
  // mean final state of its particles.
  std::vector<double> region_mass(g.n_actions(), 0.0);
  std::vector<Vector> region_final(g.n_actions(), Vector::Zero(static_cast<Eigen::Index>(g.payoff_dim())));
  for (std::size_t i = 0; i < rho0.size(); ++i) {
    region_mass[rec.initial_actions[i]] += rho0.weight(i);
    region_final[rec.initial_actions[i]] += rho0.weight(i) * rec.final_ensemble.position(i);
  }
  const std::vector<Vector> anchors = g.anchors(cand.q);
  json regions = json::array();
  for (std::size_t k = 0; k < g.n_actions(); ++k)
    if (region_mass[k] > 0.0)
      regions.push_back({{"action", g.action_names()[k]},
                         {"initial_mass", io::round9(region_mass[k])},
                         {"anchor", io::to_json(anchors[k])},
                         {"final_mean", io::to_json(region_final[k] / region_mass[k])}});

  json summary = {
      {"scenario", s.name},
      {"mode", to_string(s.mode)},
      {"seed", s.seed},
      {"particles", rho0.size()},
      {"s_max", io::round9(s.s_max)},
      {"ds", io::round9(s.ds)},
      {"actions", g.action_names()},
      {"q_initial", simplex_json(cand.q)},
      {"p", simplex_json(cand.p)},
      {"target", io::to_json(cand.y)},
      {"induced_q_initial", simplex_json(q_tilde)},
      {"nu_inf_initial", io::round9(nu_inf)},
      {"lyapunov_initial", io::round9(err.lyapunov)},
      {"self_confirmed", nu_inf <= s.confirm_tol},
      {"target_approachable", is_approachable(Target{cand.y}, g, cand.q)},
      {"anchors", io::to_json(anchors)},
      {"regions", regions},
      {"q_final", io::to_json(last.q)},
      {"target_final", io::to_json(last.y)},
      {"mean_state_final", io::to_json(last.mean)},
      {"mean_distance_final", io::round9(last.mean_distance)},
      {"max_distance_final", io::round9(last.max_distance)},
      {"mean_cost", io::round9(rec.mean_cost)},
  };
  write_json(out_dir, "summary.json", summary);
  return summary;
}

void write_solver_log(const std::optional<std::string>& dir, const std::vector<SolverLogRow>& log,
                      std::size_t n) {
  if (!dir) return;
  std::ofstream out = open_output(*dir, "solver_log.csv");
  out << "iteration,lyapunov,nu_inf";
  for (std::size_t k = 0; k < n; ++k) out << ",q_" << k + 1;
  out << '\n';
  for (const SolverLogRow& r : log) {
    out << r.iteration << ',' << io::format9(r.lyapunov) << ',' << io::format9(r.nu_inf);
    for (Eigen::Index k = 0; k < r.q.size(); ++k) out << ',' << io::format9(r.q[k]);
    out << '\n';
  }
  if (!out) throw IoError("error while writing solver_log.csv");
}

std::vector<SimplexVector> pure_qs(std::size_t n) {
  std::vector<SimplexVector> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(SimplexVector::unit(n, k));
  return out;
}

}  // namespace

json solve_equilibrium(const Scenario& s, const std::optional<std::string>& out_dir) {
  s.validate();
  const VectorPayoffGame& g = s.vector_game();
  const ParticleEnsemble rho = initial_ensemble(s);
  std::vector<SolverLogRow> log;
  FixedPointResult res = [&] {
    try {
      return fixed_point_solve(g, rho, s.candidate(), s.solver, &log);
    } catch (const NoConvergence&) {
      write_solver_log(out_dir, log, g.n_actions());
      throw;
    }
  }();
  write_solver_log(out_dir, log, g.n_actions());
  const SolverLogRow& last = log.back();
  json summary = {
      {"scenario", s.name},
      {"converged", true},
      {"iterations", res.iterations},
      {"q", simplex_json(res.candidate.q)},
      {"p", simplex_json(res.candidate.p)},
      {"target", io::to_json(res.candidate.y)},
      {"lyapunov", io::round9(last.lyapunov)},
      {"nu_inf", io::round9(last.nu_inf)},
      {"lyapunov_trace", io::to_json(Vector::Map(res.lyapunov_trace.data(),
                                                 static_cast<Eigen::Index>(res.lyapunov_trace.size())))},
      {"tol", io::round9(s.solver.tol)},
      {"eta", io::round9(s.solver.step)},
  };
  write_json(out_dir, "summary.json", summary);
  return summary;
}

json target_set_report(const VectorPayoffGame& game, const std::vector<SimplexVector>& qs) {
  json targets = json::array();
  const Vector origin = Vector::Zero(static_cast<Eigen::Index>(game.payoff_dim()));
  for (const SimplexVector& q : qs) {
    if (q.size() != game.n_actions())
      throw ValidationError("q needs " + std::to_string(game.n_actions()) + " weights");
    const PayoffPolytope t = target_set(game, q);
    targets.push_back({{"q", simplex_json(q)},
                       {"anchors", io::to_json(game.anchors(q))},
                       {"vertices", io::to_json(extreme_points(t))},
                       {"origin_approachable", t.contains(origin)}});
  }
  return {{"actions", game.action_names()}, {"targets", targets}};
}

std::vector<BayesianProfile> expected_game_nash_profiles(const HarsanyiGame& h) {
  const auto rows = enumerate_bayesian_strategies(h, 0);
  const auto cols = enumerate_bayesian_strategies(h, 1);
  std::vector<BayesianProfile> out;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double vr = ex_ante_payoff(h, 0, rows[r], cols[c]);
      const double vc = ex_ante_payoff(h, 1, cols[c], rows[r]);
      bool nash = true;
      for (std::size_t d = 0; d < rows.size() && nash; ++d)
        nash = ex_ante_payoff(h, 0, rows[d], cols[c]) <= vr + 1e-12;
      for (std::size_t d = 0; d < cols.size() && nash; ++d)
        nash = ex_ante_payoff(h, 1, cols[d], rows[r]) <= vc + 1e-12;
      if (nash) out.push_back({r, c});
    }
  return out;
}

namespace {

// Per-type maximal regret of `player` using `own` against `opp`.
Vector maximal_regret(const HarsanyiGame& h, std::size_t player, const BayesianStrategy& own,
                      const BayesianStrategy& opp,
                      const std::vector<BayesianStrategy>& alternatives) {
  const Vector base = bayesian_expected_payoffs(h, player, own, opp);
  Vector best = base;
  for (const BayesianStrategy& k : alternatives)
    best = best.cwiseMax(bayesian_expected_payoffs(h, player, k, opp));
  return best - base;
}

}  // namespace

BayesianReport bayesian_report(const HarsanyiGame& h, std::uint64_t seed, std::size_t particles) {
  BayesianReport rep;
  const VectorPayoffGame game = maximal_regret_game(h, 0);
  rep.strategy_labels = game.action_names();
  rep.nash_profiles = expected_game_nash_profiles(h);

  const auto rows = enumerate_bayesian_strategies(h, 0);
  const auto cols = enumerate_bayesian_strategies(h, 1);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const Vector reg_r = maximal_regret(h, 0, rows[r], cols[c], rows);
      const Vector reg_c = maximal_regret(h, 1, cols[c], rows[r], cols);
      if (reg_r.maxCoeff() > 1e-12 || reg_c.maxCoeff() > 1e-12) continue;
      rep.nonpositive_regret_profiles.push_back({r, c});
      const bool nash = std::any_of(rep.nash_profiles.begin(), rep.nash_profiles.end(),
                                    [&](const BayesianProfile& p) { return p.row == r && p.col == c; });
      rep.jensen_verified = rep.jensen_verified && nash;
    }

  const PayoffPolytope x = payoff_polytope(game);
  const ParticleEnsemble rho = sample_uniform(x, particles, seed);
  const Vector origin = Vector::Zero(static_cast<Eigen::Index>(game.payoff_dim()));
  for (std::size_t k = 0; k < game.n_actions(); ++k) {
    const SimplexVector q = SimplexVector::unit(game.n_actions(), k);
    const PayoffPolytope t = target_set(game, q);
    PureTargetCheck check{k, extreme_points(t), t.contains(origin), std::nullopt, {}, false};
    const std::vector<Vector> anchors = game.anchors(q);
    for (std::size_t a = 0; a < anchors.size(); ++a)
      if (anchors[a].cwiseAbs().maxCoeff() <= 1e-12) {
        check.bang_bang_action = a;
        break;
      }
    // p: weights that express the origin through the anchors, when possible.
    SimplexVector p = q;
    const PayoffPolytope hull(anchors);
    if (auto w = hull.convex_weights(origin)) {
      Vector full = Vector::Zero(static_cast<Eigen::Index>(game.n_actions()));
      // convex_weights refers to the deduplicated vertex list; map back.
      const auto& verts = hull.vertices();
      for (std::size_t v = 0; v < verts.size(); ++v)
        for (std::size_t a = 0; a < anchors.size(); ++a)
          if ((anchors[a] - verts[v]).cwiseAbs().maxCoeff() <= PayoffPolytope::kDedupTolerance) {
            full[static_cast<Eigen::Index>(a)] += (*w)[static_cast<Eigen::Index>(v)];
            break;
          }
      p = SimplexVector::normalized(full);
    }
    const auto cand = EquilibriumCandidate::with_target(p, q, origin);
    const SimplexVector qt = induced_density(game, rho, cand);
    check.induced_q = qt.weights();
    check.self_confirmed = (q.weights() - qt.weights()).lpNorm<Eigen::Infinity>() <= 0.02;
    rep.pure_q.push_back(std::move(check));
  }
  return rep;
}

json to_json(const HarsanyiGame& h, const BayesianReport& r) {
  const auto rows = enumerate_bayesian_strategies(h, 0);
  const auto cols = enumerate_bayesian_strategies(h, 1);
  auto profiles = [&](const std::vector<BayesianProfile>& ps) {
    json out = json::array();
    for (const auto& p : ps)
      out.push_back({{"row", strategy_label(h, 0, rows[p.row])},
                     {"column", strategy_label(h, 1, cols[p.col])}});
    return out;
  };
  json pure = json::array();
  bool any = false;
  for (const PureTargetCheck& c : r.pure_q) {
    json entry = {{"q", io::to_json(SimplexVector::unit(r.strategy_labels.size(), c.q_index).weights())},
                  {"target_vertices", io::to_json(c.target_vertices)},
                  {"origin_approachable", c.origin_approachable},
                  {"induced_q", io::to_json(c.induced_q)},
                  {"self_confirmed", c.self_confirmed}};
    if (c.bang_bang_action) {
      entry["bang_bang_action"] = *c.bang_bang_action + 1;
      entry["bang_bang_strategy"] = r.strategy_labels[*c.bang_bang_action];
    } else {
      entry["bang_bang_action"] = nullptr;
    }
    any = any || c.self_confirmed;
    pure.push_back(std::move(entry));
  }
  return {{"strategies", r.strategy_labels},
          {"nash_profiles", profiles(r.nash_profiles)},
          {"nonpositive_regret_profiles", profiles(r.nonpositive_regret_profiles)},
          {"jensen_verified", r.jensen_verified},
          {"pure_q", pure},
          {"any_pure_q_self_confirmed", any}};
}

json run_scenario(const Scenario& s, const std::optional<std::string>& out_dir) {
  s.validate();
  switch (s.mode) {
    case ScenarioMode::fixed_target:
    case ScenarioMode::self_confirming:
      return run_population(s, out_dir);
    case ScenarioMode::equilibrium_solve:
      return solve_equilibrium(s, out_dir);
    case ScenarioMode::target_set_report: {
      const VectorPayoffGame& g = s.vector_game();
      json rep = target_set_report(g, s.report_q.empty() ? pure_qs(g.n_actions()) : s.report_q);
      write_json(out_dir, "target_sets.json", rep);
      write_json(out_dir, "summary.json", rep);
      return rep;
    }
    case ScenarioMode::bayesian_report: {
      json rep = to_json(*s.harsanyi, bayesian_report(*s.harsanyi, s.seed, s.density.particles));
      if (out_dir) {
        const VectorPayoffGame& g = s.vector_game();
        write_json(out_dir, "target_sets.json", target_set_report(g, pure_qs(g.n_actions())));
      }
      write_json(out_dir, "summary.json", rep);
      return rep;
    }
  }
  throw ValidationError("unsupported mode");
}

}  // namespace popgame
