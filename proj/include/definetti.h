/* definetti: convergent symmetric-extension hierarchies over polytopal
 * state spaces.
 *
 * C interface to the shared library. All objects are opaque handles created
 * by df_* constructors and released by the matching df_*_free. Functions
 * return DF_OK on success; on failure they return a status code and leave a
 * human-readable message in df_last_error() (thread local). Strings returned
 * through char** are owned by the caller and released with df_string_free.
 */
#ifndef DEFINETTI_H
#define DEFINETTI_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  DF_OK = 0,
  DF_ERR = 1,        /* unspecified failure */
  DF_ERR_DOMAIN = 2, /* invalid inputs, caps, infeasibility, boundary data */
  DF_ERR_SOLVER = 3, /* numerical failure in the LP engine */
  DF_ERR_PARSE = 4   /* malformed JSON */
} df_status;

typedef struct df_space df_space;
typedef struct df_problem df_problem;
typedef struct df_game df_game;

typedef struct {
  double tol;          /* membership / feasibility slack (default 1e-7) */
  double interior_tol; /* strict-interior threshold (1e-9) */
  double bisect_tol;   /* bisection width (1e-8) */
  double rank_tol;     /* rank thresholds (1e-10) */
  double solver_tol;   /* LP pivot tolerance (1e-9) */
  int cap_dim;         /* largest tensor dimension (64) */
  long cap_enum;       /* largest enumeration (200000) */
  int cap_level;       /* largest hierarchy level (8) */
  unsigned long long seed;
  const char* cache_dir; /* vertex cache directory, NULL disables */
  const char* out_dir;   /* report directory, NULL disables persistence */
  const char* backend;   /* LP backend name, NULL means "bundled" */
} df_config;

df_config df_config_default(void);

const char* df_version(void);

/* Message of the most recent failing call on this thread. */
const char* df_last_error(void);

void df_string_free(char* text);

/* ---- state spaces ---- */

df_status df_space_parse(const char* json, df_space** out);
/* "simplex:k", "square", "polygon:m" */
df_status df_space_builtin(const char* name, df_space** out);
void df_space_free(df_space* space);
int df_space_dim(const df_space* space);

df_status df_space_to_json(const df_space* space, int pretty, char** json_out);

/* Structural validation; *pass_out is 1/0, report_out (optional) receives a
 * human-readable per-invariant report. */
df_status df_space_validate(const df_space* space, const df_config* cfg, int* pass_out,
                            char** report_out);

/* ---- entropy ---- */

typedef struct {
  double value;
  double lower;
  double upper;
  double mu;
  double lambda;
} df_entropy_result;

/* method: "exact-pwl" (default when NULL) or "adaptive". */
df_status df_relative_entropy(const df_space* space, const double* x, size_t x_len,
                              const double* y, size_t y_len, const df_config* cfg,
                              const char* method, df_entropy_result* out);

/* Optimal uniform order constant and its witness point; tau_out must hold
 * df_space_dim doubles. */
df_status df_optimize_tau(const df_space* space, const df_config* cfg, double* tau_out,
                          double* lambda_out);

/* ---- hierarchy ---- */

df_status df_problem_parse(const char* json, df_problem** out);
void df_problem_free(df_problem* problem);

/* Levels 1..n_max; with_rounding adds certified inner reports. The combined
 * schedule report JSON is returned; per-level files are written to
 * cfg->out_dir when set. */
df_status df_solve_schedule(const df_problem* problem, const df_config* cfg, int n_max,
                            int with_rounding, char** report_json_out);

/* ---- games ---- */

df_status df_game_parse(const char* json, df_game** out);
void df_game_free(df_game* game);

df_status df_game_run(const df_game* game, const df_space* k_b, const df_config* cfg, int levels,
                      int restarts, int pretty, char** report_json_out);

#ifdef __cplusplus
}
#endif

#endif /* DEFINETTI_H */
