// Command-line front end for the definetti shared library. Talks to the
// library exclusively through the C API in definetti.h; JSON in, JSON out.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "definetti.h"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitDomain = 2;
constexpr int kExitSolver = 3;

int exit_code(df_status s) {
  switch (s) {
    case DF_OK:
      return 0;
    case DF_ERR_SOLVER:
      return kExitSolver;
    default:
      return kExitDomain;
  }
}

[[noreturn]] void die(df_status s) {
  std::cerr << "error: " << df_last_error() << "\n";
  std::exit(exit_code(s));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    std::exit(kExitDomain);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Space arguments accept either a JSON file path or a builtin name.
df_space* load_space(const std::string& arg) {
  df_space* space = nullptr;
  std::ifstream probe(arg);
  df_status s = probe.good() ? df_space_parse(slurp(arg).c_str(), &space)
                             : df_space_builtin(arg.c_str(), &space);
  if (s != DF_OK) die(s);
  return space;
}

// Inline JSON array or @file.
std::string vector_arg(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') return slurp(arg.substr(1));
  return arg;
}

std::vector<double> parse_vector(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_array()) {
    std::cerr << "error: expected a JSON array of numbers\n";
    std::exit(kExitDomain);
  }
  std::vector<double> v;
  for (const auto& e : j) v.push_back(e.get<double>());
  return v;
}

struct CommonOpts {
  double tol = -1.0;
  int cap_dim = -1;
  long cap_enum = -1;
  unsigned long long seed = 0;
  bool seed_set = false;
  std::string backend, cache, out;
};

df_config make_config(const CommonOpts& o) {
  df_config cfg = df_config_default();
  if (o.tol > 0) cfg.tol = o.tol;
  if (o.cap_dim > 0) cfg.cap_dim = o.cap_dim;
  if (o.cap_enum > 0) cfg.cap_enum = o.cap_enum;
  if (o.seed_set) cfg.seed = o.seed;
  if (!o.backend.empty()) cfg.backend = o.backend.c_str();
  if (!o.cache.empty()) cfg.cache_dir = o.cache.c_str();
  if (!o.out.empty()) cfg.out_dir = o.out.c_str();
  return cfg;
}

void add_common(CLI::App* app, CommonOpts& o) {
  app->add_option("--tol", o.tol, "membership/feasibility tolerance")->envname("DEFINETTI_TOL");
  app->add_option("--cap-dim", o.cap_dim, "largest tensor dimension")->envname("DEFINETTI_CAP_DIM");
  app->add_option("--cap-enum", o.cap_enum, "largest enumeration size")
      ->envname("DEFINETTI_CAP_ENUM");
  app->add_option("--seed", o.seed, "seed for randomized searches")
      ->envname("DEFINETTI_SEED")
      ->each([&o](const std::string&) { o.seed_set = true; });
  app->add_option("--backend", o.backend, "LP backend name")->envname("DEFINETTI_BACKEND");
  app->add_option("--cache", o.cache, "vertex-enumeration cache directory")
      ->envname("DEFINETTI_CACHE");
  app->add_option("--out", o.out, "report output directory")->envname("DEFINETTI_OUT");
}

void print_solve_summary(const std::string& report) {
  json j = json::parse(report);
  std::printf("schedule %s (problem %s)\n", j.value("label", "").c_str(),
              j.value("problem_hash", "").c_str());
  std::printf("%6s %16s %16s %14s\n", "level", "outer", "inner", "bound");
  for (const auto& row : j.at("levels")) {
    const double outer = row.at("value").get<double>();
    std::string inner = "-";
    if (row.contains("inner")) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%16.9f", row.at("inner").at("best_value").get<double>());
      inner = buf;
    }
    std::printf("%6d %16.9f %16s %14.4g\n", row.at("level").get<int>(), outer, inner.c_str(),
                row.at("error_bound").get<double>());
  }
}

void print_game_summary(const std::string& report) {
  json j = json::parse(report);
  std::printf("game %s over %s\n", j.value("label", "").c_str(), j.value("space", "").c_str());
  std::printf("classical %.9f  seesaw %.9f\n", j.at("classical_value").get<double>(),
              j.at("seesaw_lower").get<double>());
  for (const auto& row : j.at("levels"))
    std::printf("level %d upper bound %.9f\n", row.at("level").get<int>(),
                row.at("upper_bound").get<double>());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"de Finetti hierarchies over polytopal state spaces"};
  app.require_subcommand(1);

  // entropy
  auto* entropy = app.add_subcommand("entropy", "relative entropy D(x||y) on a state space");
  CommonOpts eo;
  std::string e_space, e_x, e_y, e_method = "exact-pwl";
  bool e_pretty = false;
  entropy->add_option("--space", e_space, "state space JSON file or builtin name")->required();
  entropy->add_option("--x", e_x, "state x as a JSON array (or @file)")->required();
  entropy->add_option("--y", e_y, "interior state y as a JSON array (or @file)")->required();
  entropy->add_option("--method", e_method, "exact-pwl or adaptive");
  entropy->add_flag("--pretty", e_pretty, "human-readable output");
  add_common(entropy, eo);

  // solve
  auto* solve = app.add_subcommand("solve", "run the outer hierarchy on a problem file");
  CommonOpts so;
  std::string s_problem;
  int s_levels = 1;
  bool s_round = false, s_pretty = false;
  solve->add_option("problem", s_problem, "problem JSON file")->required();
  solve->add_option("--levels", s_levels, "highest hierarchy level");
  solve->add_flag("--round", s_round, "add certified inner reports");
  solve->add_flag("--pretty", s_pretty, "print a summary table");
  add_common(solve, so);

  // game
  auto* game = app.add_subcommand("game", "bounds for a two-player game over a state space");
  CommonOpts go;
  std::string g_game, g_space;
  int g_levels = 1, g_restarts = 8;
  bool g_pretty = false;
  game->add_option("game", g_game, "game JSON file")->required();
  game->add_option("--space", g_space, "B-side state space (file or builtin)")->required();
  game->add_option("--levels", g_levels, "highest hierarchy level");
  game->add_option("--restarts", g_restarts, "seesaw restarts");
  game->add_flag("--pretty", g_pretty, "human-readable output");
  add_common(game, go);

  // mkspace
  auto* mkspace = app.add_subcommand("mkspace", "emit a builtin state space as JSON");
  std::string m_name, m_out;
  mkspace->add_option("name", m_name, "simplex:k, square, or polygon:m")->required();
  mkspace->add_option("--out", m_out, "write to file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  if (entropy->parsed()) {
    df_space* space = load_space(e_space);
    std::vector<double> x = parse_vector(vector_arg(e_x));
    std::vector<double> y = parse_vector(vector_arg(e_y));
    df_config cfg = make_config(eo);
    df_entropy_result r;
    df_status s = df_relative_entropy(space, x.data(), x.size(), y.data(), y.size(), &cfg,
                                      e_method.c_str(), &r);
    if (s != DF_OK) die(s);
    if (e_pretty) {
      std::printf("D(x||y) = %.9f nats  (enclosure [%.9f, %.9f], mu %.6g, lambda %.6g)\n",
                  r.value, r.lower, r.upper, r.mu, r.lambda);
    } else {
      json j{{"value", r.value}, {"lower", r.lower}, {"upper", r.upper},
             {"mu", r.mu},       {"lambda", r.lambda}, {"method", e_method}};
      std::printf("%s\n", j.dump().c_str());
    }
    df_space_free(space);
    return 0;
  }

  if (solve->parsed()) {
    df_problem* problem = nullptr;
    df_status s = df_problem_parse(slurp(s_problem).c_str(), &problem);
    if (s != DF_OK) die(s);
    df_config cfg = make_config(so);
    char* report = nullptr;
    s = df_solve_schedule(problem, &cfg, s_levels, s_round ? 1 : 0, &report);
    if (s != DF_OK) {
      df_problem_free(problem);
      die(s);
    }
    if (s_pretty)
      print_solve_summary(report);
    else
      std::printf("%s\n", report);
    df_string_free(report);
    df_problem_free(problem);
    return 0;
  }

  if (game->parsed()) {
    df_game* g = nullptr;
    df_status s = df_game_parse(slurp(g_game).c_str(), &g);
    if (s != DF_OK) die(s);
    df_space* space = load_space(g_space);
    df_config cfg = make_config(go);
    char* report = nullptr;
    s = df_game_run(g, space, &cfg, g_levels, g_restarts, 0, &report);
    if (s != DF_OK) {
      df_game_free(g);
      df_space_free(space);
      die(s);
    }
    if (g_pretty)
      print_game_summary(report);
    else
      std::printf("%s\n", report);
    df_string_free(report);
    df_game_free(g);
    df_space_free(space);
    return 0;
  }

  if (mkspace->parsed()) {
    df_space* space = nullptr;
    df_status s = df_space_builtin(m_name.c_str(), &space);
    if (s != DF_OK) die(s);
    char* text = nullptr;
    s = df_space_to_json(space, 1, &text);
    if (s != DF_OK) die(s);
    if (m_out.empty()) {
      std::printf("%s", text);
    } else {
      std::ofstream out(m_out, std::ios::binary);
      out << text;
    }
    df_string_free(text);
    df_space_free(space);
    return 0;
  }
  return 0;
}
