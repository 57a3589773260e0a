#include <cmath>

#include "definetti/errors.hpp"
#include "definetti/games.hpp"
#include "doctest.h"

using namespace definetti;

namespace {

GameSpec random_game(Rng& rng) {
  GameSpec g;
  g.label = "random";
  g.n_x = g.n_y = g.n_a = g.n_b = 2;
  g.pi = Mat(2, 2);
  double total = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      g.pi(x, y) = -std::log(std::max(rng.uniform(), 1e-300));
      total += g.pi(x, y);
    }
  g.pi /= total;
  g.V.assign(16, 0);
  int ones = 0;
  for (int& v : g.V) {
    v = rng.uniform() < 0.5 ? 1 : 0;
    ones += v;
  }
  if (ones == 0) g.V[5] = 1;
  return g;
}

}  // namespace

TEST_CASE("classical value of reference games") {
  Config cfg;
  GameSpec chsh = chsh_game();
  CHECK(classical_value(chsh, cfg).value == doctest::Approx(0.75));

  GameSpec all_win = chsh;
  all_win.V.assign(16, 1);
  CHECK(classical_value(all_win, cfg).value == doctest::Approx(1.0));

  GameSpec all_lose = chsh;
  all_lose.V.assign(16, 0);
  CHECK(classical_value(all_lose, cfg).value == doctest::Approx(0.0));
}

TEST_CASE("game spec validation") {
  GameSpec bad = chsh_game();
  bad.pi(0, 0) = 0.9;
  CHECK_THROWS_AS(bad.check(), Error);

  GameSpec free = chsh_game();
  CHECK(free.is_free());
  GameSpec corr = chsh_game();
  corr.pi << 0.5, 0.0, 0.0, 0.5;
  CHECK_FALSE(corr.is_free());
}

TEST_CASE("assemblage body has exact no-signalling vertices") {
  Config cfg;
  CompiledGame cg = compile_game(chsh_game(), square_space(), cfg);
  const int d = cg.K_B.dim;
  for (const Vec& z : cg.assemblage.vertices) {
    Vec full = cg.assemblage.embed_point(z);
    // totals per question agree
    Vec total_x0 = Vec::Zero(d), total_x1 = Vec::Zero(d);
    for (int a = 0; a < 2; ++a)
      for (int i = 0; i < d; ++i) {
        total_x0[i] += full[(a * 2 + 0) * d + i];
        total_x1[i] += full[(a * 2 + 1) * d + i];
      }
    CHECK((total_x0 - total_x1).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK(cg.K_B.unit.dot(total_x0) == doctest::Approx(1.0));
    // each block is a cone element
    for (int a = 0; a < 2; ++a)
      for (int x = 0; x < 2; ++x)
        for (const Vec& f : cg.K_B.facets) {
          double v = 0.0;
          for (int i = 0; i < d; ++i) v += f[i] * full[(a * 2 + x) * d + i];
          CHECK(v >= -1e-9);
        }
  }
}

TEST_CASE("multimeter body vertices are complete effect tuples") {
  Config cfg;
  CompiledGame cg = compile_game(chsh_game(), square_space(), cfg);
  const int d = cg.K_B.dim;
  for (const Vec& z : cg.multimeter.vertices) {
    Vec full = cg.multimeter.embed_point(z);
    for (int y = 0; y < 2; ++y) {
      Vec sum = Vec::Zero(d);
      for (int b = 0; b < 2; ++b)
        for (int i = 0; i < d; ++i) sum[i] += full[(b * 2 + y) * d + i];
      CHECK((sum - cg.K_B.unit).lpNorm<Eigen::Infinity>() < 1e-9);
    }
    for (int b = 0; b < 2; ++b)
      for (int y = 0; y < 2; ++y)
        for (const Vec& v : cg.K_B.vertices) {
          double val = 0.0;
          for (int i = 0; i < d; ++i) val += v[i] * full[(b * 2 + y) * d + i];
          CHECK(val >= -1e-9);
          CHECK(val <= 1.0 + 1e-9);
        }
  }
}

TEST_CASE("compiled objective lies in [0,1] on vertex pairs") {
  Config cfg;
  CompiledGame cg = compile_game(chsh_game(), square_space(), cfg);
  for (const Vec& za : cg.assemblage.vertices)
    for (const Vec& zb : cg.multimeter.vertices) {
      const double v = cg.value_of(za, zb);
      CHECK(v >= -1e-9);
      CHECK(v <= 1.0 + 1e-9);
    }
}

TEST_CASE("chsh over the bit: level-2 collapse to the classical value") {
  Config cfg;
  CompiledGame cg = compile_game(chsh_game(), simplex_space(2), cfg);

  // Level 1 is the plain maximal tensor product of the two derived bodies
  // and reaches the trivial bound: the cross-body tensor can correlate the
  // internal index of the assemblage with the measurement index. The
  // classical value appears one level up.
  OuterReport r1 = solve_level(cg.problem, 1, cfg);
  CHECK(-r1.value == doctest::Approx(1.0).epsilon(1e-7));
  OuterReport r2 = solve_level(cg.problem, 2, cfg);
  CHECK(-r2.value == doctest::Approx(0.75).epsilon(1e-7));

  SeesawResult lower = seesaw_lower(cg, 4, cfg);
  CHECK(lower.value == doctest::Approx(0.75).epsilon(1e-6));
}

TEST_CASE("chsh over the square reaches the box value 1 from both sides") {
  Config cfg;
  StateSpace sq = square_space();
  CompiledGame cg = compile_game(chsh_game(), sq, cfg);

  // Explicit box strategy: conditional states of the extremal box under the
  // coordinate measurements, paired with the same coordinate multimeter.
  Vec box = Vec::Zero(9);
  box[0] = 1.0;            // unit coordinate
  box[1 * 3 + 1] = 1.0;    // <A1 B1>
  box[1 * 3 + 2] = 1.0;    // <A1 B2>
  box[2 * 3 + 1] = 1.0;    // <A2 B1>
  box[2 * 3 + 2] = -1.0;   // <A2 B2>

  std::vector<Vec> alice_effects = {
      (Vec(3) << 0.5, 0.5, 0.0).finished(), (Vec(3) << 0.5, -0.5, 0.0).finished(),
      (Vec(3) << 0.5, 0.0, 0.5).finished(), (Vec(3) << 0.5, 0.0, -0.5).finished()};

  Vec assemblage_full = Vec::Zero(2 * 2 * 3);
  for (int a = 0; a < 2; ++a)
    for (int x = 0; x < 2; ++x) {
      const Vec& m = alice_effects[2 * x + a];
      for (int j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (int i = 0; i < 3; ++i) acc += m[i] * box[i * 3 + j];
        assemblage_full[(a * 2 + x) * 3 + j] = acc;
      }
    }
  Vec multimeter_full = Vec::Zero(2 * 2 * 3);
  for (int b = 0; b < 2; ++b)
    for (int y = 0; y < 2; ++y) {
      const Vec& n = alice_effects[2 * y + b];
      for (int i = 0; i < 3; ++i) multimeter_full[(b * 2 + y) * 3 + i] = n[i];
    }

  Vec za = cg.assemblage.reduce_point(assemblage_full);
  Vec zb = cg.multimeter.reduce_point(multimeter_full);
  CHECK(cg.value_of(za, zb) == doctest::Approx(1.0).epsilon(1e-9));

  // Membership of the constructed pair in their bodies.
  for (int r = 0; r < cg.assemblage.facets.rows(); ++r)
    CHECK(cg.assemblage.facets.row(r).dot(za) >= -1e-9);
  for (int r = 0; r < cg.multimeter.facets.rows(); ++r)
    CHECK(cg.multimeter.facets.row(r).dot(zb) >= -1e-9);

  // Level 1 overshoots the game value; frozen as a regression constant.
  OuterReport rep = solve_level(cg.problem, 1, cfg);
  CHECK(-rep.value == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(-rep.value >= 1.0 - 1e-9);
  // the full vertex sweep escapes the classical local maximum
  SeesawResult lower = seesaw_lower(cg, 40, cfg);
  CHECK(lower.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(-solve_level(cg.problem, 2, cfg).value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("compiled dimension cap") {
  Config cfg;
  cfg.cap_dim = 16;
  CHECK_THROWS_AS(compile_game(chsh_game(), square_space(), cfg), Error);
}

TEST_CASE("trivial games") {
  Config cfg;
  GameSpec all_win = chsh_game();
  all_win.label = "all-win";
  all_win.V.assign(16, 1);
  CompiledGame cg = compile_game(all_win, square_space(), cfg);
  // every strategy wins, and normalization pins the relaxation at 1 already
  // at the first level
  CHECK(-solve_level(cg.problem, 1, cfg).value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(seesaw_lower(cg, 2, cfg).value == doctest::Approx(1.0).epsilon(1e-9));

  GameSpec all_lose = chsh_game();
  all_lose.label = "all-lose";
  all_lose.V.assign(16, 0);
  CompiledGame cg0 = compile_game(all_lose, simplex_space(2), cfg);
  CHECK(seesaw_lower(cg0, 2, cfg).value == doctest::Approx(0.0));
}

TEST_CASE("relaxation ordering on random games") {
  Config cfg;
  Rng rng(501);
  for (int trial = 0; trial < 4; ++trial) {
    GameSpec g = random_game(rng);
    StateSpace kb = trial % 2 == 0 ? StateSpace(simplex_space(2)) : square_space();
    CompiledGame cg = compile_game(g, kb, cfg);
    const double classical = classical_value(g, cfg).value;
    const double lower = seesaw_lower(cg, 4, cfg).value;
    const double upper = -solve_level(cg.problem, 1, cfg).value;
    CHECK(classical <= lower + 1e-8);
    CHECK(lower <= upper + 1e-8);
  }
}
