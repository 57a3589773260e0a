#include "definetti.h"

#include <cstring>
#include <string>

#include "entropy.hpp"
#include "errors.hpp"
#include "json_io.hpp"

#define DF_API __attribute__((visibility("default")))

namespace {

using namespace definetti;

thread_local std::string g_last_error;

df_status status_of(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::ParseError:
      return DF_ERR_PARSE;
    case ErrorKind::SolverFailure:
      return DF_ERR_SOLVER;
    default:
      return DF_ERR_DOMAIN;
  }
}

template <typename Fn>
df_status guarded(Fn&& fn) {
  try {
    fn();
    return DF_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DF_ERR;
  }
}

Config config_of(const df_config* c) {
  Config cfg;
  if (!c) return cfg;
  cfg.tol = c->tol;
  cfg.interior_tol = c->interior_tol;
  cfg.bisect_tol = c->bisect_tol;
  cfg.rank_tol = c->rank_tol;
  cfg.solver_tol = c->solver_tol;
  cfg.cap_dim = c->cap_dim;
  cfg.cap_enum = c->cap_enum;
  cfg.cap_level = c->cap_level;
  cfg.seed = c->seed;
  if (c->cache_dir) cfg.cache_dir = c->cache_dir;
  if (c->out_dir) cfg.out_dir = c->out_dir;
  if (c->backend) cfg.backend = c->backend;
  return cfg;
}

char* new_cstring(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct df_space {
  definetti::StateSpace space;
};

struct df_problem {
  definetti::LocalProblem problem;
};

struct df_game {
  definetti::GameSpec game;
};

extern "C" {

DF_API df_config df_config_default(void) {
  df_config c;
  definetti::Config d;
  c.tol = d.tol;
  c.interior_tol = d.interior_tol;
  c.bisect_tol = d.bisect_tol;
  c.rank_tol = d.rank_tol;
  c.solver_tol = d.solver_tol;
  c.cap_dim = d.cap_dim;
  c.cap_enum = d.cap_enum;
  c.cap_level = d.cap_level;
  c.seed = d.seed;
  c.cache_dir = nullptr;
  c.out_dir = nullptr;
  c.backend = nullptr;
  return c;
}

DF_API const char* df_version(void) { return "0.1.0"; }

DF_API const char* df_last_error(void) { return g_last_error.c_str(); }

DF_API void df_string_free(char* text) { delete[] text; }

DF_API df_status df_space_parse(const char* json, df_space** out) {
  if (!json || !out) return DF_ERR_PARSE;
  return guarded([&] { *out = new df_space{definetti::space_from_json(json)}; });
}

DF_API df_status df_space_builtin(const char* name, df_space** out) {
  if (!name || !out) return DF_ERR_PARSE;
  return guarded([&] { *out = new df_space{definetti::builtin_space(name)}; });
}

DF_API void df_space_free(df_space* space) { delete space; }

DF_API int df_space_dim(const df_space* space) { return space ? space->space.dim : 0; }

DF_API df_status df_space_to_json(const df_space* space, int pretty, char** json_out) {
  if (!space || !json_out) return DF_ERR_PARSE;
  return guarded(
      [&] { *json_out = new_cstring(definetti::space_to_json(space->space, pretty != 0)); });
}

DF_API df_status df_space_validate(const df_space* space, const df_config* cfg, int* pass_out,
                                   char** report_out) {
  if (!space || !pass_out) return DF_ERR_PARSE;
  return guarded([&] {
    definetti::ValidationReport rep = definetti::validate(space->space, config_of(cfg));
    *pass_out = rep.pass ? 1 : 0;
    if (report_out) *report_out = new_cstring(rep.summary());
  });
}

DF_API df_status df_relative_entropy(const df_space* space, const double* x, size_t x_len,
                                     const double* y, size_t y_len, const df_config* cfg,
                                     const char* method, df_entropy_result* out) {
  if (!space || !x || !y || !out) return DF_ERR_PARSE;
  return guarded([&] {
    const int d = space->space.dim;
    definetti::require_valid(space->space, config_of(cfg));
    if (static_cast<int>(x_len) != d || static_cast<int>(y_len) != d)
      definetti::fail(definetti::ErrorKind::ShapeMismatch,
                      "state length does not match the space dimension");
    definetti::Vec xv(d), yv(d);
    for (int i = 0; i < d; ++i) {
      xv[i] = x[i];
      yv[i] = y[i];
    }
    definetti::EntropyResult r = definetti::relative_entropy(
        space->space, xv, yv, config_of(cfg), method ? method : "exact-pwl");
    out->value = r.value;
    out->lower = r.lower;
    out->upper = r.upper;
    out->mu = r.mu;
    out->lambda = r.lambda;
  });
}

DF_API df_status df_optimize_tau(const df_space* space, const df_config* cfg, double* tau_out,
                                 double* lambda_out) {
  if (!space || !tau_out || !lambda_out) return DF_ERR_PARSE;
  return guarded([&] {
    definetti::TauResult r = definetti::optimize_tau(space->space, config_of(cfg));
    for (int i = 0; i < space->space.dim; ++i) tau_out[i] = r.tau[i];
    *lambda_out = r.lambda;
  });
}

DF_API df_status df_problem_parse(const char* json, df_problem** out) {
  if (!json || !out) return DF_ERR_PARSE;
  return guarded([&] { *out = new df_problem{definetti::problem_from_json(json)}; });
}

DF_API void df_problem_free(df_problem* problem) { delete problem; }

DF_API df_status df_solve_schedule(const df_problem* problem, const df_config* cfg, int n_max,
                                   int with_rounding, char** report_json_out) {
  if (!problem || !report_json_out) return DF_ERR_PARSE;
  return guarded([&] {
    definetti::ScheduleResult r =
        definetti::run_and_report(problem->problem, n_max, with_rounding != 0, config_of(cfg));
    *report_json_out = new_cstring(r.json);
  });
}

DF_API df_status df_game_parse(const char* json, df_game** out) {
  if (!json || !out) return DF_ERR_PARSE;
  return guarded([&] { *out = new df_game{definetti::game_from_json(json)}; });
}

DF_API void df_game_free(df_game* game) { delete game; }

DF_API df_status df_game_run(const df_game* game, const df_space* k_b, const df_config* cfg,
                             int levels, int restarts, int pretty, char** report_json_out) {
  if (!game || !k_b || !report_json_out) return DF_ERR_PARSE;
  return guarded([&] {
    *report_json_out = new_cstring(definetti::game_report(
        game->game, k_b->space, levels, restarts, config_of(cfg), pretty != 0));
  });
}

}  // extern "C"
