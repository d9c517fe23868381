#include "popgame/popgame.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "popgame/error.hpp"
#include "popgame/game.hpp"
#include "popgame/harsanyi.hpp"
#include "popgame/scenario.hpp"

struct pg_game {
  popgame::VectorPayoffGame game;
};

struct pg_harsanyi {
  popgame::HarsanyiGame game;
};

struct pg_scenario {
  popgame::Scenario scenario;
};

namespace {

thread_local std::string last_error;

pg_status fail(pg_status code, const std::string& msg) {
  last_error = msg;
  return code;
}

// Runs f, mapping exceptions onto status codes.
template <class F>
pg_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return PG_OK;
  } catch (const popgame::Error& e) {
    return fail(static_cast<pg_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PG_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw popgame::ValidationError(std::string(what) + " must not be NULL");
}

popgame::SimplexVector simplex(const double* q, std::size_t n) {
  return popgame::SimplexVector(
      Eigen::Map<const Eigen::VectorXd>(q, static_cast<Eigen::Index>(n)));
}

}  // namespace

extern "C" {

const char* pg_last_error(void) { return last_error.c_str(); }

void pg_string_free(char* s) { std::free(s); }

const char* pg_version(void) { return "1.0.0"; }

pg_status pg_game_load(const char* name_or_path, pg_game** out) {
  return guarded([&] {
    require(name_or_path, "name_or_path");
    require(out, "out");
    *out = new pg_game{popgame::load_game(name_or_path)};
  });
}

void pg_game_free(pg_game* game) { delete game; }

size_t pg_game_n_actions(const pg_game* game) { return game ? game->game.n_actions() : 0; }

size_t pg_game_payoff_dim(const pg_game* game) { return game ? game->game.payoff_dim() : 0; }

pg_status pg_game_mixed_payoff(const pg_game* game, size_t action, const double* q, size_t n,
                               double* out, size_t out_len) {
  return guarded([&] {
    require(game, "game");
    require(q, "q");
    require(out, "out");
    const auto& g = game->game;
    if (n != g.n_actions()) throw popgame::ValidationError("q length must equal the action count");
    if (action >= g.n_actions()) throw popgame::ValidationError("action index out of range");
    if (out_len < g.payoff_dim()) throw popgame::ValidationError("output buffer too small");
    const Eigen::VectorXd u = g.mixed_payoff(action, simplex(q, n));
    std::copy(u.data(), u.data() + u.size(), out);
  });
}

pg_status pg_report_target_sets(const pg_game* game, const double* qs, size_t n_q,
                                char** json_out) {
  return guarded([&] {
    require(game, "game");
    require(json_out, "json_out");
    const auto& g = game->game;
    std::vector<popgame::SimplexVector> list;
    if (n_q == 0) {
      for (std::size_t k = 0; k < g.n_actions(); ++k)
        list.push_back(popgame::SimplexVector::unit(g.n_actions(), k));
    } else {
      require(qs, "qs");
      for (std::size_t i = 0; i < n_q; ++i) list.push_back(simplex(qs + i * g.n_actions(), g.n_actions()));
    }
    *json_out = dup_string(popgame::target_set_report(g, list).dump(2));
  });
}

pg_status pg_harsanyi_load(const char* name_or_path, pg_harsanyi** out) {
  return guarded([&] {
    require(name_or_path, "name_or_path");
    require(out, "out");
    *out = new pg_harsanyi{popgame::load_harsanyi(name_or_path)};
  });
}

void pg_harsanyi_free(pg_harsanyi* h) { delete h; }

pg_status pg_report_bayesian(const pg_harsanyi* h, uint64_t seed, char** json_out) {
  return guarded([&] {
    require(h, "h");
    require(json_out, "json_out");
    const auto rep = popgame::bayesian_report(h->game, seed);
    *json_out = dup_string(popgame::to_json(h->game, rep).dump(2));
  });
}

pg_status pg_harsanyi_regret_game(const pg_harsanyi* h, pg_game** out) {
  return guarded([&] {
    require(h, "h");
    require(out, "out");
    *out = new pg_game{popgame::maximal_regret_game(h->game)};
  });
}

pg_status pg_scenario_load(const char* name_or_path, pg_scenario** out) {
  return guarded([&] {
    require(name_or_path, "name_or_path");
    require(out, "out");
    *out = new pg_scenario{popgame::load_scenario(name_or_path)};
  });
}

pg_status pg_scenario_load_builtin(const char* name, double a, double b, pg_scenario** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = new pg_scenario{popgame::builtin_scenario(name, {a, b})};
  });
}

void pg_scenario_free(pg_scenario* s) { delete s; }

pg_status pg_scenario_set(pg_scenario* s, const char* key, double value) {
  return guarded([&] {
    require(s, "scenario");
    require(key, "key");
    const std::string k = key;
    auto whole = [&](const char* what) {
      if (!(value >= 0.0) || value != std::floor(value) || value > 1e15)
        throw popgame::ValidationError(std::string(what) + " must be a nonnegative integer");
      return static_cast<std::size_t>(value);
    };
    popgame::Scenario next = s->scenario;
    if (k == "seed") next.seed = whole("seed");
    else if (k == "particles") next.density.particles = whole("particles");
    else if (k == "s_max") next.s_max = value;
    else if (k == "ds") next.ds = value;
    else if (k == "eta") next.solver.step = value;
    else if (k == "tol") next.solver.tol = value;
    else if (k == "max_iter") next.solver.max_iter = whole("max_iter");
    else throw popgame::ValidationError("unknown scenario setting '" + k + "'");
    next.validate();
    s->scenario = std::move(next);
  });
}

pg_status pg_scenario_run(const pg_scenario* s, const char* out_dir, char** summary_json) {
  return guarded([&] {
    require(s, "scenario");
    std::optional<std::string> dir;
    if (out_dir) dir = out_dir;
    const auto summary = popgame::run_scenario(s->scenario, dir);
    if (summary_json) *summary_json = dup_string(summary.dump(2));
  });
}

pg_status pg_scenario_solve(const pg_scenario* s, const char* out_dir, char** summary_json) {
  return guarded([&] {
    require(s, "scenario");
    std::optional<std::string> dir;
    if (out_dir) dir = out_dir;
    const auto summary = popgame::solve_equilibrium(s->scenario, dir);
    if (summary_json) *summary_json = dup_string(summary.dump(2));
  });
}

}  // extern "C"
