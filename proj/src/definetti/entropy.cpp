#include "entropy.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"

namespace definetti {

namespace {

// Supporting line a*s + b of the integrand at a fixed s, from the optimal
// effect: a = f(y), b = -f(x). Every such line underestimates h globally.
struct Line {
  double a = 0.0;
  double b = 0.0;
  double at(double s) const { return a * s + b; }
};

struct Piece {
  double s1 = 0.0;
  double s2 = 0.0;
  Line line;
};

// Integral of (a s + b)/s over [s1, s2]; s1 may be zero only when b is.
double piece_integral(const Piece& p, double* slack) {
  const double ds = p.s2 - p.s1;
  double val = p.line.a * ds;
  if (p.s1 < 1e-300) {
    *slack += std::abs(p.line.b) * 40.0;  // |b| is tolerance-level here
  } else {
    val += p.line.b * std::log(p.s2 / p.s1);
  }
  return val;
}

class Integrand {
 public:
  Integrand(const StateSpace& K, const Vec& x, const Vec& y, const Config& cfg)
      : K_(K), x_(x), y_(y), cfg_(cfg) {}

  // h(s) and its supporting line.
  std::pair<double, Line> eval(double s) {
    ++lp_calls_;
    auto [val, f] = effect_sup_argmax(K_, Vec(s * y_ - x_), cfg_);
    Line ln{f.dot(y_), -f.dot(x_)};
    return {val, ln};
  }

  int lp_calls() const { return lp_calls_; }

 private:
  const StateSpace& K_;
  const Vec& x_;
  const Vec& y_;
  const Config& cfg_;
  int lp_calls_ = 0;
};

constexpr int kMaxDepth = 60;

// Recursive envelope reconstruction: line1/line2 support h at s1/s2. Emits
// exact pieces; `slack` accumulates tolerance-level give-ups.
void walk_pieces(Integrand& H, double s1, Line line1, double s2, Line line2,
                 std::vector<Piece>& out, double* slack, int depth) {
  const double scale = 1.0 + std::abs(line1.at(s1)) + std::abs(line2.at(s2));
  const double ctol = 1e-10 * scale;
  if (s2 - s1 < 1e-12 * (1.0 + s2)) {
    out.push_back({s1, s2, line2});
    *slack += (s2 - s1) * scale;
    return;
  }
  if (std::abs(line1.a - line2.a) * (1.0 + s2) + std::abs(line1.b - line2.b) < ctol) {
    out.push_back({s1, s2, line1});
    return;
  }
  double cross = (line2.b - line1.b) / (line1.a - line2.a);
  if (cross <= s1) {
    // The lines meet at the left end, so line2 supports h across the bracket.
    out.push_back({s1, s2, line2});
    return;
  }
  if (cross >= s2) {
    out.push_back({s1, s2, line1});
    return;
  }
  if (depth >= kMaxDepth) {
    // Chord overestimates h on this bracket; keep it and account for the gap.
    Line chord;
    chord.a = (line2.at(s2) - line1.at(s1)) / (s2 - s1);
    chord.b = line1.at(s1) - chord.a * s1;
    out.push_back({s1, s2, chord});
    *slack += (std::abs(line1.at(s1)) + std::abs(line2.at(s2))) * (s2 - s1);
    return;
  }
  auto [hval, lnew] = H.eval(cross);
  const double env = std::max(line1.at(cross), line2.at(cross));
  if (hval <= env + ctol) {
    out.push_back({s1, cross, line1});
    out.push_back({cross, s2, line2});
    return;
  }
  walk_pieces(H, s1, line1, cross, lnew, out, slack, depth + 1);
  walk_pieces(H, cross, lnew, s2, line2, out, slack, depth + 1);
}

// Closed-form integral of max(0, line)/s over [s1, s2] (h >= 0 throughout).
double clipped_line_integral(Line ln, double s1, double s2, double* slack) {
  if (ln.a == 0.0 && ln.b <= 0.0) return 0.0;
  double lo = s1, hi = s2;
  if (ln.at(s1) < 0.0 && ln.at(s2) < 0.0) return 0.0;
  if (ln.at(s1) < 0.0) lo = -ln.b / ln.a;
  if (ln.at(s2) < 0.0) hi = -ln.b / ln.a;
  Piece p{lo, hi, ln};
  return piece_integral(p, slack);
}

}  // namespace

EntropyResult relative_entropy(const StateSpace& K, const Vec& x, const Vec& y, const Config& cfg,
                               const std::string& method, double enclosure_tol) {
  if (x.size() != K.dim || y.size() != K.dim)
    fail(ErrorKind::ShapeMismatch, "relative_entropy: dimension mismatch");
  for (const Vec& f : K.facets)
    if (f.dot(x) < -cfg.tol)
      fail(ErrorKind::ShapeMismatch, "relative_entropy: x is not a cone element");

  auto [mu, lambda] = order_bounds(K, x, y, cfg);
  mu = std::max(mu, 0.0);
  const double a_unit = K.unit.dot(x);
  const double b_unit = K.unit.dot(y);
  const double closing = a_unit * std::log(lambda) + b_unit * (1.0 - lambda);

  EntropyResult res;
  res.mu = mu;
  res.lambda = lambda;
  res.method = method;

  if (lambda - mu < 1e-14) {
    res.value = closing;
    res.lower = res.value - 1e-12;
    res.upper = res.value + 1e-12;
    return res;
  }

  Integrand H(K, x, y, cfg);

  if (method == "exact-pwl") {
    auto [h1, l1] = H.eval(mu);
    auto [h2, l2] = H.eval(lambda);
    (void)h1;
    (void)h2;
    std::vector<Piece> pieces;
    double slack = 0.0;
    walk_pieces(H, mu, l1, lambda, l2, pieces, &slack, 0);
    double integral = 0.0;
    for (const Piece& p : pieces) integral += piece_integral(p, &slack);
    res.value = integral + closing;
    const double err = slack + 2e-9 * (1.0 + std::abs(res.value)) * (1 + H.lp_calls());
    res.lower = res.value - err;
    res.upper = res.value + err;
    return res;
  }

  if (method != "adaptive")
    fail(ErrorKind::ShapeMismatch, "relative_entropy: unknown method '" + method + "'");

  // Adaptive: per interval keep chord (upper) and clipped-tangent (lower)
  // integrals; split the worst interval until the enclosure is tight.
  struct Node {
    double s, h;
    Line line;
  };
  struct Interval {
    Node a, b;
    double lower, upper;
  };
  auto make_node = [&](double s) {
    auto [h, ln] = H.eval(s);
    return Node{s, std::max(h, 0.0), ln};
  };
  double ignored = 0.0;
  auto bracket = [&](const Node& na, const Node& nb) {
    Interval iv{na, nb, 0.0, 0.0};
    // Chord over [a,b] dominates h by convexity.
    Line chord;
    chord.a = (nb.h - na.h) / (nb.s - na.s);
    chord.b = na.h - chord.a * na.s;
    if (na.s < 1e-300) {
      iv.upper = chord.a * (nb.s - na.s) + std::abs(chord.b) * 40.0;
    } else {
      Piece p{na.s, nb.s, chord};
      iv.upper = piece_integral(p, &ignored);
    }
    // Lower: integral of max(0, best tangent).
    const double low_a = clipped_line_integral(na.line, na.s, nb.s, &ignored);
    const double low_b = clipped_line_integral(nb.line, na.s, nb.s, &ignored);
    iv.lower = std::max(low_a, low_b);
    iv.upper = std::max(iv.upper, iv.lower);
    return iv;
  };

  std::vector<Interval> ivs;
  {
    const int initial = 8;
    std::vector<Node> nodes;
    nodes.push_back(make_node(mu));
    const double lo = std::max(mu, lambda * 1e-9);
    for (int i = 1; i < initial; ++i) {
      const double t = static_cast<double>(i) / initial;
      nodes.push_back(make_node(lo * std::pow(lambda / lo, t)));
    }
    nodes.push_back(make_node(lambda));
    for (size_t i = 0; i + 1 < nodes.size(); ++i)
      if (nodes[i + 1].s > nodes[i].s + 1e-300) ivs.push_back(bracket(nodes[i], nodes[i + 1]));
  }

  for (int round = 0; round < 4000; ++round) {
    double gap = 0.0;
    size_t worst = 0;
    for (size_t i = 0; i < ivs.size(); ++i) {
      const double g = ivs[i].upper - ivs[i].lower;
      if (g > gap) {
        gap = g;
        worst = i;
      }
    }
    double total_gap = 0.0;
    for (const auto& iv : ivs) total_gap += iv.upper - iv.lower;
    if (total_gap <= enclosure_tol) break;
    if (round == 3999 || ivs[worst].b.s - ivs[worst].a.s < 1e-13)
      fail(ErrorKind::EnclosureTooWide,
           "adaptive enclosure stalled at width " + std::to_string(total_gap));
    Interval iv = ivs[worst];
    const double mid = iv.a.s < 1e-300 ? iv.b.s * 0.5
                                       : std::sqrt(std::max(iv.a.s, 1e-300) * iv.b.s);
    Node nm = make_node(mid);
    ivs[worst] = bracket(iv.a, nm);
    ivs.push_back(bracket(nm, iv.b));
  }

  double lower = 0.0, upper = 0.0;
  for (const auto& iv : ivs) {
    lower += iv.lower;
    upper += iv.upper;
  }
  res.lower = lower + closing;
  res.upper = upper + closing;
  res.value = 0.5 * (res.lower + res.upper);
  return res;
}

double kl_divergence(const Vec& p, const Vec& q) {
  if (p.size() != q.size()) fail(ErrorKind::ShapeMismatch, "kl_divergence: length mismatch");
  double d = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] < -1e-12 || q[i] < -1e-12)
      fail(ErrorKind::SupportMismatch, "kl_divergence: negative entry");
    if (p[i] <= 1e-300) continue;  // 0 ln 0 = 0
    if (q[i] <= 1e-300)
      fail(ErrorKind::SupportMismatch, "kl_divergence: support of p escapes support of q");
    d += p[i] * std::log(p[i] / q[i]);
  }
  return d;
}

double pinsker_gap(const StateSpace& K, const Vec& x, const Vec& y, const Config& cfg) {
  EntropyResult D = relative_entropy(K, x, y, cfg);
  const double tv = effect_sup(K, Vec(x - y), cfg);
  return D.value - 0.5 * tv * tv;
}

double mutual_information_upper(const ProductSpace& P, const Vec& x_AB, const Vec& tau_A,
                                const Config& cfg) {
  if (x_AB.size() != P.dim() || tau_A.size() != P.A().dim)
    fail(ErrorKind::ShapeMismatch, "mutual_information_upper: dimensions");
  Vec x_B = P.marginal_B(x_AB);
  if (!is_interior(P.B(), x_B, cfg))
    fail(ErrorKind::NotInterior,
         "mutual_information_upper: the B-marginal is on the boundary; mix the state toward an "
         "interior product state before calling");
  if (!is_interior(P.A(), tau_A, cfg))
    fail(ErrorKind::NotInterior, "mutual_information_upper: tau_A is not interior");
  StateSpace KP = P.as_state_space(cfg);
  return relative_entropy(KP, x_AB, tensor_of(tau_A, x_B), cfg).value;
}

DeFinettiConstants definetti_constants(const ProductSpace& P, const Measurement& M_A,
                                       const Measurement& M_B, const Config& cfg) {
  DeFinettiConstants c;
  TauResult tau = optimize_tau(P.A(), cfg);
  c.lambda_A = tau.lambda;
  c.tau_A = tau.tau;
  c.c_A = tau.lambda * (1.0 + std::log(tau.lambda));
  // The exact bipartite-ball route needs the vertex list; it only applies in
  // small tensor dimension, so skip the enumeration otherwise.
  std::vector<Vec> bipartite_vertices;
  if (P.dim() <= 8) bipartite_vertices = P.max_vertices(cfg);
  InjectivityResult inj = injectivity_constant(P.A(), P.B(), M_A, M_B, bipartite_vertices, cfg);
  c.f_AB = inj.value;
  c.conservative_f = inj.conservative;
  c.c_AB = std::sqrt(2.0 * c.c_A) / c.f_AB;
  return c;
}

double definetti_bound(const DeFinettiConstants& c, int n) {
  if (n < 1) fail(ErrorKind::ShapeMismatch, "definetti_bound: n must be positive");
  return 2.0 * c.c_AB / std::sqrt(static_cast<double>(n));
}

}  // namespace definetti
