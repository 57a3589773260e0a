#ifndef DEFINETTI_GAMES_HPP
#define DEFINETTI_GAMES_HPP

#include <string>
#include <vector>

#include "config.hpp"
#include "hierarchy.hpp"
#include "polyhedra.hpp"

namespace definetti {

/// Two-player game: question distribution pi on X x Y and binary predicate
/// V(a, b, x, y). Winning coefficients are g_{abxy} = pi(x,y) V(a,b,x,y).
struct GameSpec {
  int n_x = 0, n_y = 0, n_a = 0, n_b = 0;
  Mat pi;                  // n_x by n_y
  std::vector<int> V;      // [a][b][x][y] row-major
  std::string label;

  int v_at(int a, int b, int x, int y) const {
    return V[((a * n_b + b) * n_x + x) * n_y + y];
  }
  double g(int a, int b, int x, int y) const { return pi(x, y) * v_at(a, b, x, y); }
  void check() const;
  bool is_free(double tol = 1e-12) const;  // product question distribution
};

GameSpec chsh_game();

/// The game compiled to a bilinear problem over two derived bodies: the
/// assemblage polytope (subnormalized B-states with an input-independent
/// total) and the multimeter polytope (complete effect tuples). The
/// LocalProblem carries the negated value covector so the min-convention
/// hierarchy yields upper bounds on the game value.
struct CompiledGame {
  GameSpec game;
  StateSpace K_B;
  SlicedBody assemblage;  // ambient: (a, x, i) blocks of rho~_{a|x}
  SlicedBody multimeter;  // ambient: (b, y, i) blocks of n_{b|y}
  Mat value_matrix;       // reduced-coordinates bilinear value (max sense)
  LocalProblem problem;   // P = -vec(value_matrix)

  double value_of(const Vec& assemblage_reduced, const Vec& multimeter_reduced) const;
};

CompiledGame compile_game(const GameSpec& game, const StateSpace& K_B,
                          const Config& cfg = Config());

struct ClassicalResult {
  double value = 0.0;
  std::vector<int> answer_a;  // per question x
  std::vector<int> answer_b;  // per question y
};

/// Exhaustive deterministic-strategy optimum.
ClassicalResult classical_value(const GameSpec& game, const Config& cfg = Config());

struct SeesawResult {
  double value = 0.0;
  Vec assemblage_reduced;
  Vec multimeter_reduced;
  int best_restart = -1;
  int rounds = 0;
};

/// Alternating vertex maximization between the two bodies. Restart 0 starts
/// from the best classical strategy (so the result never falls below it);
/// further restarts start from seeded random multimeter vertices.
SeesawResult seesaw_lower(const CompiledGame& compiled, int restarts,
                          const Config& cfg = Config());

}  // namespace definetti

#endif
