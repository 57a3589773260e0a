#ifndef DEFINETTI_JSON_IO_HPP
#define DEFINETTI_JSON_IO_HPP

#include <string>
#include <vector>

#include "games.hpp"
#include "hierarchy.hpp"
#include "rounding.hpp"

namespace definetti {

// StateSpace schema: {"label","dim","vertices":[[...]],"facets":[[...]],
// "unit":[...]}, decimal doubles, row-major.
std::string space_to_json(const StateSpace& K, bool pretty = false);
StateSpace space_from_json(const std::string& text);

/// Built-in spaces by name: "simplex:k", "square", "polygon:m".
StateSpace builtin_space(const std::string& name);

// Problem schema: {"A":
// StateSpace,"B":...,"P":[...],"F_A":[[...]],"F_B":...,"G_A":...,"G_B":...}.
std::string problem_to_json(const LocalProblem& p, bool pretty = false);
LocalProblem problem_from_json(const std::string& text);

// Game schema: {"X","Y","A","B","pi":[[x][y]],"V":[a][b][x][y]}.
std::string game_to_json(const GameSpec& g, bool pretty = false);
GameSpec game_from_json(const std::string& text);

std::string outer_report_to_json(const OuterReport& rep, const std::string& problem_hash,
                                 bool pretty = false);
std::string inner_report_to_json(const InnerReport& rep, int level,
                                 const std::string& problem_hash, bool pretty = false);

struct ScheduleResult {
  std::vector<OuterReport> outer;
  std::vector<InnerReport> inner;  // empty unless rounding was requested
  std::string problem_hash;
  std::string json;  // combined report
  std::string csv;   // level, outer, inner, bound
};

/// Runs levels 1..n_max (optionally with rounding) and renders the combined
/// report. When cfg.out_dir is set, per-level reports and the summary CSV are
/// persisted there (outer-n<k>.json, inner-n<k>.json, summary.csv,
/// schedule.json); existing level files with the same problem hash are reused
/// instead of re-solved.
ScheduleResult run_and_report(const LocalProblem& problem, int n_max, bool round,
                              const Config& cfg);

/// Full game pipeline: classical value, seesaw lower bound, hierarchy upper
/// bounds for levels 1..levels. Returns the report JSON (persisted to
/// cfg.out_dir/game.json when set).
std::string game_report(const GameSpec& game, const StateSpace& K_B, int levels, int restarts,
                        const Config& cfg, bool pretty = false);

}  // namespace definetti

#endif
