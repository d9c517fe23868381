/* C interface to the population approachability library.
 *
 * Every function returns a pg_status. On failure pg_last_error() returns a
 * thread-local message describing the last error. Strings handed out by
 * the library must be released with pg_string_free(). */
#ifndef POPGAME_H
#define POPGAME_H

#include <stddef.h>
#include <stdint.h>

#if defined(POPGAME_BUILDING_LIBRARY)
#define PG_API __attribute__((visibility("default")))
#else
#define PG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pg_status {
  PG_OK = 0,
  PG_ERR_INTERNAL = 1,
  PG_ERR_VALIDATION = 2,
  PG_ERR_NO_CONVERGENCE = 3,
  PG_ERR_IO = 4
} pg_status;

typedef struct pg_game pg_game;
typedef struct pg_harsanyi pg_harsanyi;
typedef struct pg_scenario pg_scenario;

PG_API const char* pg_last_error(void);
PG_API void pg_string_free(char* s);
PG_API const char* pg_version(void);

/* Games: builtin scenario name or JSON file (game or scenario document). */
PG_API pg_status pg_game_load(const char* name_or_path, pg_game** out);
PG_API void pg_game_free(pg_game* game);
PG_API size_t pg_game_n_actions(const pg_game* game);
PG_API size_t pg_game_payoff_dim(const pg_game* game);
/* out receives payoff_dim values of u(action, q). */
PG_API pg_status pg_game_mixed_payoff(const pg_game* game, size_t action,
                                      const double* q, size_t n, double* out,
                                      size_t out_len);
/* JSON vertex lists of T(q) for each of n_q simplex vectors (row-major,
 * n_q x n_actions). n_q == 0 reports every pure q. */
PG_API pg_status pg_report_target_sets(const pg_game* game, const double* qs,
                                       size_t n_q, char** json_out);

PG_API pg_status pg_harsanyi_load(const char* name_or_path, pg_harsanyi** out);
PG_API void pg_harsanyi_free(pg_harsanyi* h);
PG_API pg_status pg_report_bayesian(const pg_harsanyi* h, uint64_t seed,
                                    char** json_out);
/* Max-regret vector game of a Harsanyi game (player 0 view). */
PG_API pg_status pg_harsanyi_regret_game(const pg_harsanyi* h, pg_game** out);

/* Scenarios: builtin name or JSON file. */
PG_API pg_status pg_scenario_load(const char* name_or_path, pg_scenario** out);
/* Builtin with parameters (parametric: a, b). */
PG_API pg_status pg_scenario_load_builtin(const char* name, double a, double b,
                                          pg_scenario** out);
PG_API void pg_scenario_free(pg_scenario* s);
/* Keys: "seed", "particles", "s_max", "ds", "eta", "tol", "max_iter". */
PG_API pg_status pg_scenario_set(pg_scenario* s, const char* key, double value);
/* out_dir may be NULL (no files). summary_json may be NULL. */
PG_API pg_status pg_scenario_run(const pg_scenario* s, const char* out_dir,
                                 char** summary_json);
PG_API pg_status pg_scenario_solve(const pg_scenario* s, const char* out_dir,
                                   char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* POPGAME_H */
