// Command-line front end; talks to the library only through popgame.h.
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "popgame/popgame.h"

namespace {

int report_failure(pg_status st) {
  std::fprintf(stderr, "error: %s\n", pg_last_error());
  return static_cast<int>(st);
}

int print_and_free(char* text) {
  if (text) {
    std::fputs(text, stdout);
    std::fputc('\n', stdout);
    pg_string_free(text);
  }
  return 0;
}

struct ScenarioArgs {
  std::string name;
  std::optional<double> a, b;
  std::optional<long long> seed, particles, max_iter;
  std::optional<double> s_max, ds, eta, tol;
  std::string out;
};

pg_status open_scenario(const ScenarioArgs& args, pg_scenario** s) {
  pg_status st = (args.a || args.b)
                     ? pg_scenario_load_builtin(args.name.c_str(), args.a.value_or(-1.0),
                                                args.b.value_or(2.0), s)
                     : pg_scenario_load(args.name.c_str(), s);
  if (st != PG_OK) return st;
  auto set = [&](const char* key, auto value) -> pg_status {
    if (!value) return PG_OK;
    return pg_scenario_set(*s, key, static_cast<double>(*value));
  };
  for (pg_status r : {set("seed", args.seed), set("particles", args.particles),
                      set("s_max", args.s_max), set("ds", args.ds), set("eta", args.eta),
                      set("tol", args.tol), set("max_iter", args.max_iter)})
    if (r != PG_OK) {
      pg_scenario_free(*s);
      *s = nullptr;
      return r;
    }
  return PG_OK;
}

void add_scenario_options(CLI::App* cmd, ScenarioArgs& args) {
  cmd->add_option("scenario", args.name, "Built-in scenario name or scenario file")->required();
  cmd->add_option("--seed", args.seed, "Random seed");
  cmd->add_option("--particles", args.particles, "Number of particles");
  cmd->add_option("--out", args.out, "Output directory");
  cmd->add_option("--a", args.a, "Parameter a of the parametric game");
  cmd->add_option("--b", args.b, "Parameter b of the parametric game");
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw CLI::ValidationError("--q", "not a number list: " + text);
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Population games with vector payoffs: approachability, self-confirmed "
               "equilibria and mean-field simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pg_version()));

  ScenarioArgs run_args;
  auto* run = app.add_subcommand("run", "Run a scenario and write trajectory/summary files");
  add_scenario_options(run, run_args);
  run->add_option("--s-max", run_args.s_max, "Final log-time");
  run->add_option("--ds", run_args.ds, "Log-time step (at most 0.1)");

  auto* report = app.add_subcommand("report", "Static reports");
  report->require_subcommand(1);
  std::string game_name;
  std::vector<std::string> q_args;
  auto* targets = report->add_subcommand("target-sets", "Vertices of T(q) = conv{u(k,q)}");
  targets->add_option("game", game_name, "Built-in scenario name or game/scenario file")->required();
  targets->add_option("--q", q_args, "Population mix, comma separated (repeatable); default: every pure q");
  std::string harsanyi_name;
  long long bayes_seed = 1;
  auto* bayes = report->add_subcommand("bayesian", "Bayesian equilibrium and self-confirmation report");
  bayes->add_option("harsanyi", harsanyi_name, "Harsanyi game file or bayesian_bos")->required();
  bayes->add_option("--seed", bayes_seed, "Seed of the ensemble used for induced q");

  ScenarioArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Equilibrium solvers");
  solve->require_subcommand(1);
  auto* eq = solve->add_subcommand("equilibrium", "Damped fixed-point iteration q <- (1-eta) q + eta q~");
  add_scenario_options(eq, solve_args);
  eq->add_option("--eta", solve_args.eta, "Damping in (0, 1]");
  eq->add_option("--tol", solve_args.tol, "Stop when |q - q~|_inf <= tol");
  eq->add_option("--max-iter", solve_args.max_iter, "Iteration budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(PG_ERR_VALIDATION);
  }

  if (run->parsed() || eq->parsed()) {
    const ScenarioArgs& args = run->parsed() ? run_args : solve_args;
    pg_scenario* s = nullptr;
    pg_status st = open_scenario(args, &s);
    if (st != PG_OK) return report_failure(st);
    char* summary = nullptr;
    const char* out = args.out.empty() ? nullptr : args.out.c_str();
    st = run->parsed() ? pg_scenario_run(s, out, &summary) : pg_scenario_solve(s, out, &summary);
    pg_scenario_free(s);
    if (st != PG_OK) return report_failure(st);
    return print_and_free(summary);
  }

  if (targets->parsed()) {
    pg_game* g = nullptr;
    pg_status st = pg_game_load(game_name.c_str(), &g);
    if (st != PG_OK) return report_failure(st);
    std::vector<double> flat;
    const std::size_t n = pg_game_n_actions(g);
    try {
      for (const std::string& q : q_args) {
        const std::vector<double> v = parse_vector(q);
        if (v.size() != n) {
          pg_game_free(g);
          std::fprintf(stderr, "error: --q %s needs %zu weights\n", q.c_str(), n);
          return static_cast<int>(PG_ERR_VALIDATION);
        }
        flat.insert(flat.end(), v.begin(), v.end());
      }
    } catch (const CLI::ValidationError& e) {
      pg_game_free(g);
      std::fprintf(stderr, "error: %s\n", e.what());
      return static_cast<int>(PG_ERR_VALIDATION);
    }
    char* text = nullptr;
    st = pg_report_target_sets(g, flat.data(), q_args.size(), &text);
    pg_game_free(g);
    if (st != PG_OK) return report_failure(st);
    return print_and_free(text);
  }

  if (bayes->parsed()) {
    pg_harsanyi* h = nullptr;
    pg_status st = pg_harsanyi_load(harsanyi_name.c_str(), &h);
    if (st != PG_OK) return report_failure(st);
    char* text = nullptr;
    st = pg_report_bayesian(h, static_cast<uint64_t>(bayes_seed), &text);
    pg_harsanyi_free(h);
    if (st != PG_OK) return report_failure(st);
    return print_and_free(text);
  }
  return static_cast<int>(PG_ERR_VALIDATION);
}
