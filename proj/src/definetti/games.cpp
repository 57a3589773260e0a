#include "games.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace definetti {

void GameSpec::check() const {
  if (n_x < 1 || n_y < 1 || n_a < 1 || n_b < 1)
    fail(ErrorKind::ShapeMismatch, "game alphabets must be nonempty");
  if (pi.rows() != n_x || pi.cols() != n_y)
    fail(ErrorKind::ShapeMismatch, "pi must be |X| by |Y|");
  if (static_cast<long>(V.size()) != static_cast<long>(n_a) * n_b * n_x * n_y)
    fail(ErrorKind::ShapeMismatch, "predicate table size mismatch");
  double total = 0.0;
  for (int x = 0; x < n_x; ++x)
    for (int y = 0; y < n_y; ++y) {
      if (pi(x, y) < -1e-12) fail(ErrorKind::ParseError, "pi has a negative entry");
      total += pi(x, y);
    }
  if (std::abs(total - 1.0) > 1e-9) fail(ErrorKind::ParseError, "pi does not sum to 1");
  for (int v : V)
    if (v != 0 && v != 1) fail(ErrorKind::ParseError, "predicate must be 0/1 valued");
}

bool GameSpec::is_free(double tol) const {
  Vec px = pi.rowwise().sum();
  Vec py = pi.colwise().sum();
  for (int x = 0; x < n_x; ++x)
    for (int y = 0; y < n_y; ++y)
      if (std::abs(pi(x, y) - px[x] * py[y]) > tol) return false;
  return true;
}

GameSpec chsh_game() {
  GameSpec g;
  g.label = "chsh";
  g.n_x = g.n_y = g.n_a = g.n_b = 2;
  g.pi = Mat::Constant(2, 2, 0.25);
  g.V.assign(16, 0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          g.V[((a * 2 + b) * 2 + x) * 2 + y] = ((a ^ b) == (x & y)) ? 1 : 0;
  return g;
}

namespace {

// Ambient coordinate of component i of block (a, x) in an (n_a, n_x, d)
// layout.
int block_coord(int a, int x, int i, int n_x, int d) { return (a * n_x + x) * d + i; }

SlicedBody assemblage_body(const GameSpec& game, const StateSpace& K_B, const Config& cfg) {
  const int d = K_B.dim;
  const int N = game.n_a * game.n_x * d;

  Mat ineqs(game.n_a * game.n_x * K_B.num_facets(), N);
  ineqs.setZero();
  int row = 0;
  for (int a = 0; a < game.n_a; ++a)
    for (int x = 0; x < game.n_x; ++x)
      for (const Vec& f : K_B.facets) {
        for (int i = 0; i < d; ++i) ineqs(row, block_coord(a, x, i, game.n_x, d)) = f[i];
        ++row;
      }

  // No-signalling rows sum_a rho~_{a|x} = sum_a rho~_{a|0}, plus the
  // normalization of the common total.
  Mat eq((game.n_x - 1) * d + 1, N);
  eq.setZero();
  Vec rhs = Vec::Zero(eq.rows());
  row = 0;
  for (int x = 1; x < game.n_x; ++x)
    for (int i = 0; i < d; ++i) {
      for (int a = 0; a < game.n_a; ++a) {
        eq(row, block_coord(a, x, i, game.n_x, d)) = 1.0;
        eq(row, block_coord(a, 0, i, game.n_x, d)) -= 1.0;
      }
      ++row;
    }
  for (int a = 0; a < game.n_a; ++a)
    for (int i = 0; i < d; ++i) eq(row, block_coord(a, 0, i, game.n_x, d)) = K_B.unit[i];
  rhs[row] = 1.0;

  return make_sliced_body(N, ineqs, eq, rhs, cfg, "assemblage body");
}

SlicedBody multimeter_body(const GameSpec& game, const StateSpace& K_B, const Config& cfg) {
  const int d = K_B.dim;
  const int N = game.n_b * game.n_y * d;

  Mat ineqs(game.n_b * game.n_y * K_B.num_vertices(), N);
  ineqs.setZero();
  int row = 0;
  for (int b = 0; b < game.n_b; ++b)
    for (int y = 0; y < game.n_y; ++y)
      for (const Vec& v : K_B.vertices) {
        for (int i = 0; i < d; ++i) ineqs(row, block_coord(b, y, i, game.n_y, d)) = v[i];
        ++row;
      }

  // Completeness: sum_b n_{b|y} = 1_K for every y.
  Mat eq(game.n_y * d, N);
  eq.setZero();
  Vec rhs(eq.rows());
  row = 0;
  for (int y = 0; y < game.n_y; ++y)
    for (int i = 0; i < d; ++i) {
      for (int b = 0; b < game.n_b; ++b) eq(row, block_coord(b, y, i, game.n_y, d)) = 1.0;
      rhs[row] = K_B.unit[i];
      ++row;
    }

  return make_sliced_body(N, ineqs, eq, rhs, cfg, "multimeter body");
}

StateSpace body_as_space(const SlicedBody& body, const std::string& label) {
  StateSpace K;
  K.dim = body.dim();
  K.label = label;
  K.unit = body.unit;
  for (int i = 0; i < body.facets.rows(); ++i) K.facets.push_back(body.facets.row(i));
  K.vertices = body.vertices;
  return K;
}

}  // namespace

double CompiledGame::value_of(const Vec& a_red, const Vec& m_red) const {
  return a_red.dot(value_matrix * m_red);
}

CompiledGame compile_game(const GameSpec& game, const StateSpace& K_B, const Config& cfg) {
  game.check();
  require_valid(K_B, cfg);

  CompiledGame cg;
  cg.game = game;
  cg.K_B = K_B;
  cg.assemblage = assemblage_body(game, K_B, cfg);
  cg.multimeter = multimeter_body(game, K_B, cfg);

  const int dA = cg.assemblage.dim();
  const int dB = cg.multimeter.dim();
  if (static_cast<long>(dA) * dB > cfg.cap_dim)
    fail(ErrorKind::DimensionOverflow,
         "compiled game tensor dimension " + std::to_string(dA * dB) + " exceeds cap " +
             std::to_string(cfg.cap_dim));

  // Value functional sum g_{abxy} n_{b|y}(rho~_{a|x}) pulled back to the
  // reduced coordinates of the two bodies.
  const int d = K_B.dim;
  Mat YA = cg.assemblage.embed_linear();  // N_A x dA
  Mat YB = cg.multimeter.embed_linear();
  Mat full = Mat::Zero(YA.rows(), YB.rows());
  for (int a = 0; a < game.n_a; ++a)
    for (int b = 0; b < game.n_b; ++b)
      for (int x = 0; x < game.n_x; ++x)
        for (int y = 0; y < game.n_y; ++y) {
          const double w = game.g(a, b, x, y);
          if (w == 0.0) continue;
          for (int i = 0; i < d; ++i)
            full(block_coord(a, x, i, game.n_x, d), block_coord(b, y, i, game.n_y, d)) += w;
        }
  cg.value_matrix = YA.transpose() * full * YB;

  cg.problem.label = game.label + "@" + K_B.label;
  cg.problem.A = body_as_space(cg.assemblage, game.label + "-assemblages");
  cg.problem.B = body_as_space(cg.multimeter, game.label + "-multimeters");
  cg.problem.P = Vec(static_cast<long>(dA) * dB);
  for (int i = 0; i < dA; ++i)
    for (int k = 0; k < dB; ++k) cg.problem.P[i * dB + k] = -cg.value_matrix(i, k);
  cg.problem.F_A = Mat(0, dA);
  cg.problem.F_B = Mat(0, dB);
  cg.problem.G_A = Mat(0, dA);
  cg.problem.G_B = Mat(0, dB);
  return cg;
}

ClassicalResult classical_value(const GameSpec& game, const Config& cfg) {
  game.check();
  double strategies = 1.0;
  for (int x = 0; x < game.n_x; ++x) strategies *= game.n_a;
  for (int y = 0; y < game.n_y; ++y) strategies *= game.n_b;
  if (strategies > static_cast<double>(cfg.cap_enum))
    fail(ErrorKind::EnumerationOverflow, "deterministic strategy count exceeds cap");

  ClassicalResult best;
  best.value = -1.0;
  std::vector<int> fa(game.n_x, 0), fb(game.n_y, 0);
  auto advance = [](std::vector<int>& digits, int base) {
    for (size_t i = 0; i < digits.size(); ++i) {
      if (++digits[i] < base) return true;
      digits[i] = 0;
    }
    return false;
  };
  do {
    std::fill(fb.begin(), fb.end(), 0);
    do {
      double v = 0.0;
      for (int x = 0; x < game.n_x; ++x)
        for (int y = 0; y < game.n_y; ++y) v += game.g(fa[x], fb[y], x, y);
      if (v > best.value + 1e-15) {
        best.value = v;
        best.answer_a = fa;
        best.answer_b = fb;
      }
    } while (advance(fb, game.n_b));
  } while (advance(fa, game.n_a));
  return best;
}

SeesawResult seesaw_lower(const CompiledGame& cg, int restarts, const Config& cfg) {
  if (restarts < 1) fail(ErrorKind::ShapeMismatch, "seesaw needs at least one restart");
  const auto& va = cg.assemblage.vertices;
  const auto& vb = cg.multimeter.vertices;

  // Restart 0: the best classical strategy as a deterministic multimeter.
  ClassicalResult classical = classical_value(cg.game, cfg);
  Vec classical_meter = Vec::Zero(cg.game.n_b * cg.game.n_y * cg.K_B.dim);
  for (int y = 0; y < cg.game.n_y; ++y)
    for (int i = 0; i < cg.K_B.dim; ++i)
      classical_meter[(classical.answer_b[y] * cg.game.n_y + y) * cg.K_B.dim + i] =
          cg.K_B.unit[i];

  // Restart 0 is the classical seed; the next restarts sweep the multimeter
  // vertices in order, and anything beyond draws seeded random vertices.
  Rng rng(cfg.seed ^ 0x5ee5aaULL);
  SeesawResult best;
  best.value = -kInf;
  for (int r = 0; r < restarts; ++r) {
    Vec zB;
    if (r == 0)
      zB = cg.multimeter.reduce_point(classical_meter);
    else if (static_cast<size_t>(r - 1) < vb.size())
      zB = vb[r - 1];
    else
      zB = vb[rng.below(vb.size())];
    Vec zA;
    double val = -kInf;
    int rounds = 0;
    for (; rounds < 500; ++rounds) {
      // best assemblage vertex against the fixed multimeter
      Vec cA = cg.value_matrix * zB;
      int ia = 0;
      for (size_t i = 1; i < va.size(); ++i)
        if (cA.dot(va[i]) > cA.dot(va[ia]) + 1e-15) ia = static_cast<int>(i);
      zA = va[ia];
      // best multimeter vertex against the fixed assemblage
      Vec cB = cg.value_matrix.transpose() * zA;
      int ib = 0;
      for (size_t i = 1; i < vb.size(); ++i)
        if (cB.dot(vb[i]) > cB.dot(vb[ib]) + 1e-15) ib = static_cast<int>(i);
      zB = vb[ib];
      const double now = cg.value_of(zA, zB);
      if (now <= val + 1e-12) {
        val = std::max(val, now);
        break;
      }
      val = now;
    }
    if (val > best.value + 1e-15) {
      best.value = val;
      best.assemblage_reduced = zA;
      best.multimeter_reduced = zB;
      best.best_restart = r;
      best.rounds = rounds;
    }
  }
  return best;
}

}  // namespace definetti
