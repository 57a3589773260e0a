#include "json_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"

namespace definetti {

using nlohmann::json;

namespace {

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat_json(const Mat& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) rows.push_back(vec_json(m.row(r)));
  return rows;
}

Vec vec_from(const json& a) {
  Vec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[i] = a.at(i).get<double>();
  return v;
}

Mat mat_from(const json& rows, int cols) {
  if (rows.empty()) return Mat(0, cols);
  Mat m(rows.size(), rows.at(0).size());
  for (size_t r = 0; r < rows.size(); ++r) {
    const json& row = rows.at(r);
    if (static_cast<long>(row.size()) != m.cols())
      fail(ErrorKind::ParseError, "ragged matrix rows");
    for (size_t c = 0; c < row.size(); ++c) m(r, c) = row.at(c).get<double>();
  }
  return m;
}

json parse(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::ParseError, std::string("invalid JSON for ") + what);
  return j;
}

std::string dump(const json& j, bool pretty) { return pretty ? j.dump(2) + "\n" : j.dump(); }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::ParseError, "cannot write " + path);
  out << text;
}

json space_json(const StateSpace& K) {
  json j;
  j["label"] = K.label;
  j["dim"] = K.dim;
  json vs = json::array();
  for (const Vec& v : K.vertices) vs.push_back(vec_json(v));
  j["vertices"] = vs;
  json fs = json::array();
  for (const Vec& f : K.facets) fs.push_back(vec_json(f));
  j["facets"] = fs;
  j["unit"] = vec_json(K.unit);
  return j;
}

StateSpace space_from(const json& j) {
  StateSpace K;
  try {
    K.label = j.value("label", "");
    K.dim = j.at("dim").get<int>();
    for (const auto& row : j.at("vertices")) K.vertices.push_back(vec_from(row));
    for (const auto& row : j.at("facets")) K.facets.push_back(vec_from(row));
    K.unit = vec_from(j.at("unit"));
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, std::string("state space: ") + e.what());
  }
  return K;
}

}  // namespace

std::string space_to_json(const StateSpace& K, bool pretty) { return dump(space_json(K), pretty); }

StateSpace space_from_json(const std::string& text) {
  return space_from(parse(text, "state space"));
}

StateSpace builtin_space(const std::string& name) {
  auto colon = name.find(':');
  const std::string kind = name.substr(0, colon);
  int arg = 0;
  if (colon != std::string::npos) {
    try {
      arg = std::stoi(name.substr(colon + 1));
    } catch (...) {
      fail(ErrorKind::ParseError, "bad builtin space '" + name + "'");
    }
  }
  if (kind == "simplex") return simplex_space(arg);
  if (kind == "square") return square_space();
  if (kind == "polygon") return polygon_space(arg);
  fail(ErrorKind::ParseError,
       "unknown builtin space '" + name + "' (use simplex:k, square, polygon:m)");
}

std::string problem_to_json(const LocalProblem& p, bool pretty) {
  json j;
  j["label"] = p.label;
  j["A"] = space_json(p.A);
  j["B"] = space_json(p.B);
  j["P"] = vec_json(p.P);
  j["F_A"] = mat_json(p.F_A);
  j["F_B"] = mat_json(p.F_B);
  j["G_A"] = mat_json(p.G_A);
  j["G_B"] = mat_json(p.G_B);
  return dump(j, pretty);
}

LocalProblem problem_from_json(const std::string& text) {
  json j = parse(text, "problem");
  LocalProblem p;
  try {
    p.label = j.value("label", "problem");
    p.A = space_from(j.at("A"));
    p.B = space_from(j.at("B"));
    p.P = vec_from(j.at("P"));
    p.F_A = mat_from(j.value("F_A", json::array()), p.A.dim);
    p.F_B = mat_from(j.value("F_B", json::array()), p.B.dim);
    p.G_A = mat_from(j.value("G_A", json::array()), p.A.dim);
    p.G_B = mat_from(j.value("G_B", json::array()), p.B.dim);
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, std::string("problem: ") + e.what());
  }
  return p;
}

std::string game_to_json(const GameSpec& g, bool pretty) {
  json j;
  j["label"] = g.label;
  j["X"] = g.n_x;
  j["Y"] = g.n_y;
  j["A"] = g.n_a;
  j["B"] = g.n_b;
  j["pi"] = mat_json(g.pi);
  json v = json::array();
  for (int a = 0; a < g.n_a; ++a) {
    json vb = json::array();
    for (int b = 0; b < g.n_b; ++b) {
      json vx = json::array();
      for (int x = 0; x < g.n_x; ++x) {
        json vy = json::array();
        for (int y = 0; y < g.n_y; ++y) vy.push_back(g.v_at(a, b, x, y));
        vx.push_back(vy);
      }
      vb.push_back(vx);
    }
    v.push_back(vb);
  }
  j["V"] = v;
  return dump(j, pretty);
}

GameSpec game_from_json(const std::string& text) {
  json j = parse(text, "game");
  GameSpec g;
  try {
    g.label = j.value("label", "game");
    g.n_x = j.at("X").get<int>();
    g.n_y = j.at("Y").get<int>();
    g.n_a = j.at("A").get<int>();
    g.n_b = j.at("B").get<int>();
    g.pi = mat_from(j.at("pi"), g.n_y);
    g.V.assign(static_cast<size_t>(g.n_a) * g.n_b * g.n_x * g.n_y, 0);
    const json& v = j.at("V");
    for (int a = 0; a < g.n_a; ++a)
      for (int b = 0; b < g.n_b; ++b)
        for (int x = 0; x < g.n_x; ++x)
          for (int y = 0; y < g.n_y; ++y)
            g.V[((a * g.n_b + b) * g.n_x + x) * g.n_y + y] =
                v.at(a).at(b).at(x).at(y).get<int>();
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, std::string("game: ") + e.what());
  }
  g.check();
  return g;
}

namespace {

json constants_json(const DeFinettiConstants& c) {
  json j;
  j["lambda_A"] = c.lambda_A;
  j["c_A"] = c.c_A;
  j["f_AB"] = c.f_AB;
  j["c_AB"] = c.c_AB;
  j["tau_A"] = vec_json(c.tau_A);
  j["conservative_f"] = c.conservative_f;
  return j;
}

json outer_json(const OuterReport& rep, const std::string& problem_hash) {
  json j;
  j["kind"] = "outer-report";
  j["problem_hash"] = problem_hash;
  j["level"] = rep.level;
  j["value"] = rep.value;
  j["x_AB"] = vec_json(rep.x_AB);
  json y;
  y["d_A"] = rep.y_opt.d_A;
  y["d_B"] = rep.y_opt.d_B();
  y["n"] = rep.y_opt.n();
  y["coeffs"] = vec_json(rep.y_opt.flat());
  j["y_opt"] = y;
  j["p_norm"] = rep.p_norm;
  j["p_norm_conservative"] = rep.p_norm_conservative;
  j["error_bound"] = rep.error_bound;
  j["constants"] = constants_json(rep.constants);
  j["solver"] = {{"status", rep.solver.status}, {"iterations", rep.solver.iterations}};
  return j;
}

json inner_json(const InnerReport& rep, int level, const std::string& problem_hash) {
  json j;
  j["kind"] = "inner-report";
  j["problem_hash"] = problem_hash;
  j["level"] = level;
  j["best_value"] = rep.best_value;
  j["best_point"] = {{"x_A", vec_json(rep.best_x_A)}, {"x_B", vec_json(rep.best_x_B)}};
  j["m_star"] = rep.m_star;
  j["best_outcome"] = rep.best_outcome;
  j["best_residual"] = rep.best_residual;
  j["certified_terms"] = rep.certified_terms;
  j["mixture_value"] = rep.mixture_value;
  j["mixture_residual"] = rep.mixture_residual;
  j["gap_to_outer"] = rep.gap_to_outer;
  j["certified_bound"] = rep.certified_bound;
  j["dropped_mass"] = rep.dropped_mass;
  return j;
}

OuterReport outer_from_json(const json& j, const LocalProblem& problem, const Config& cfg) {
  OuterReport rep;
  rep.level = j.at("level").get<int>();
  rep.value = j.at("value").get<double>();
  rep.x_AB = vec_from(j.at("x_AB"));
  const json& y = j.at("y_opt");
  rep.y_opt = SymExtension::from_flat(y.at("d_A").get<int>(),
                                      sym_index(y.at("d_B").get<int>(), y.at("n").get<int>(), cfg),
                                      vec_from(y.at("coeffs")));
  rep.p_norm = j.at("p_norm").get<double>();
  rep.p_norm_conservative = j.at("p_norm_conservative").get<bool>();
  rep.error_bound = j.at("error_bound").get<double>();
  const json& c = j.at("constants");
  rep.constants.lambda_A = c.at("lambda_A").get<double>();
  rep.constants.c_A = c.at("c_A").get<double>();
  rep.constants.f_AB = c.at("f_AB").get<double>();
  rep.constants.c_AB = c.at("c_AB").get<double>();
  rep.constants.tau_A = vec_from(c.at("tau_A"));
  rep.constants.conservative_f = c.at("conservative_f").get<bool>();
  rep.solver.status = j.at("solver").at("status").get<std::string>();
  rep.solver.iterations = j.at("solver").at("iterations").get<int>();
  (void)problem;
  return rep;
}

}  // namespace

std::string outer_report_to_json(const OuterReport& rep, const std::string& problem_hash,
                                 bool pretty) {
  return dump(outer_json(rep, problem_hash), pretty);
}

std::string inner_report_to_json(const InnerReport& rep, int level,
                                 const std::string& problem_hash, bool pretty) {
  return dump(inner_json(rep, level, problem_hash), pretty);
}

ScheduleResult run_and_report(const LocalProblem& problem, int n_max, bool round,
                              const Config& cfg) {
  ScheduleResult result;
  result.problem_hash = content_hash_hex(problem_to_json(problem));

  const bool persist = !cfg.out_dir.empty();
  if (persist) std::filesystem::create_directories(cfg.out_dir);
  auto outer_path = [&](int n) {
    return cfg.out_dir + "/outer-n" + std::to_string(n) + ".json";
  };
  auto inner_path = [&](int n) {
    return cfg.out_dir + "/inner-n" + std::to_string(n) + ".json";
  };

  Measurement round_meas = round ? ic_measurement(problem.B, cfg) : Measurement{};

  for (int n = 1; n <= n_max; ++n) {
    OuterReport rep;
    bool reused = false;
    if (persist) {
      std::ifstream in(outer_path(n));
      if (in) {
        std::stringstream ss;
        ss << in.rdbuf();
        json j = json::parse(ss.str(), nullptr, false);
        if (!j.is_discarded() && j.value("problem_hash", "") == result.problem_hash) {
          rep = outer_from_json(j, problem, cfg);
          reused = true;
        }
      }
    }
    if (!reused) {
      rep = solve_level(problem, n, cfg);
      if (persist) write_file(outer_path(n), outer_report_to_json(rep, result.problem_hash));
    }
    if (!result.outer.empty() && rep.value < result.outer.back().value - cfg.tol)
      fail(ErrorKind::SolverFailure, "outer monotonicity violated at level " + std::to_string(n));
    result.outer.push_back(rep);

    if (round) {
      InnerReport inner = inner_search(problem, result.outer.back(), round_meas, cfg);
      if (persist)
        write_file(inner_path(n), inner_report_to_json(inner, n, result.problem_hash));
      result.inner.push_back(inner);
    }
  }

  std::ostringstream csv;
  csv << "level,outer,inner,bound\n";
  json combined;
  combined["kind"] = "schedule";
  combined["problem_hash"] = result.problem_hash;
  combined["label"] = problem.label;
  json levels = json::array();
  for (size_t i = 0; i < result.outer.size(); ++i) {
    const OuterReport& o = result.outer[i];
    json row = outer_json(o, result.problem_hash);
    csv << o.level << "," << json(o.value).dump() << ",";
    if (round) {
      row["inner"] = inner_json(result.inner[i], o.level, result.problem_hash);
      csv << json(result.inner[i].best_value).dump();
    }
    csv << "," << json(o.error_bound).dump() << "\n";
    levels.push_back(row);
  }
  combined["levels"] = levels;
  result.csv = csv.str();
  result.json = combined.dump();
  if (persist) {
    write_file(cfg.out_dir + "/schedule.json", result.json);
    write_file(cfg.out_dir + "/summary.csv", result.csv);
  }
  return result;
}

std::string game_report(const GameSpec& game, const StateSpace& K_B, int levels, int restarts,
                        const Config& cfg, bool pretty) {
  CompiledGame cg = compile_game(game, K_B, cfg);
  ClassicalResult classical = classical_value(game, cfg);
  SeesawResult seesaw = seesaw_lower(cg, restarts, cfg);

  json j;
  j["kind"] = "game-report";
  j["game_hash"] = content_hash_hex(game_to_json(game));
  j["label"] = game.label;
  j["space"] = K_B.label;
  j["free_game"] = game.is_free();
  j["classical_value"] = classical.value;
  j["seesaw_lower"] = seesaw.value;
  j["seesaw_restart"] = seesaw.best_restart;
  j["assemblage_dim"] = cg.assemblage.dim();
  j["multimeter_dim"] = cg.multimeter.dim();
  json lv = json::array();
  for (int n = 1; n <= levels; ++n) {
    OuterReport rep = solve_level(cg.problem, n, cfg);
    json row;
    row["level"] = n;
    row["upper_bound"] = -rep.value;
    row["error_bound"] = rep.error_bound;
    row["iterations"] = rep.solver.iterations;
    lv.push_back(row);
  }
  j["levels"] = lv;
  std::string text = dump(j, pretty);
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    write_file(cfg.out_dir + "/game.json", dump(j, false));
  }
  return text;
}

}  // namespace definetti
