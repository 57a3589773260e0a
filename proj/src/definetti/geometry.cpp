#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "errors.hpp"
#include "polyhedra.hpp"

namespace definetti {

Mat StateSpace::vertex_matrix() const {
  Mat V(num_vertices(), dim);
  for (int i = 0; i < num_vertices(); ++i) V.row(i) = vertices[i];
  return V;
}

Mat StateSpace::facet_matrix() const {
  Mat F(num_facets(), dim);
  for (int i = 0; i < num_facets(); ++i) F.row(i) = facets[i];
  return F;
}

Mat Measurement::matrix() const {
  if (effects.empty()) return Mat();
  Mat M(effects.size(), effects[0].vector.size());
  for (size_t i = 0; i < effects.size(); ++i) M.row(i) = effects[i].vector;
  return M;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& i : issues)
    os << (i.pass ? "[pass] " : "[FAIL] ") << i.invariant << " (worst " << i.worst << ")\n";
  return os.str();
}

ValidationReport validate(const StateSpace& K, const Config& cfg) {
  ValidationReport rep;
  auto add = [&](const std::string& name, bool pass, double worst) {
    rep.issues.push_back({name, pass, worst});
    rep.pass = rep.pass && pass;
  };

  bool shapes_ok = K.dim > 0 && !K.vertices.empty() && !K.facets.empty() && K.unit.size() == K.dim;
  for (const Vec& v : K.vertices) shapes_ok = shapes_ok && v.size() == K.dim;
  for (const Vec& f : K.facets) shapes_ok = shapes_ok && f.size() == K.dim;
  if (!shapes_ok) {
    add("well-formed", false, 1.0);
    return rep;
  }

  double worst_facet = 0.0;
  for (const Vec& f : K.facets)
    for (const Vec& v : K.vertices) worst_facet = std::max(worst_facet, -f.dot(v));
  add("facet-nonnegativity", worst_facet <= cfg.tol, worst_facet);

  double worst_unit = 0.0;
  for (const Vec& v : K.vertices) worst_unit = std::max(worst_unit, std::abs(K.unit.dot(v) - 1.0));
  add("base-normalization", worst_unit <= cfg.tol, worst_unit);

  // unit = sum c_i facet_i with c >= 0, probed as LP feasibility.
  {
    LinearProgram lp;
    lp.name = "unit-in-dual-cone";
    const int nf = K.num_facets();
    lp.objective = Vec::Zero(nf);
    lp.eq_A = K.facet_matrix().transpose();
    lp.eq_b = K.unit;
    lp.lb = Vec::Zero(nf);
    Solution s = solve(lp, cfg);
    const double worst =
        s.status == SolveStatus::Infeasible ? std::max(s.residual_eq, 2 * cfg.tol) : 0.0;
    add("unit-in-dual-cone", s.optimal(), worst);
  }

  {
    Eigen::JacobiSVD<Mat> svd(K.vertex_matrix());
    const double smax = svd.singularValues()[0];
    const int last = static_cast<int>(svd.singularValues().size()) - 1;
    const double smin = K.num_vertices() >= K.dim ? svd.singularValues()[last] : 0.0;
    const bool full = smin > cfg.rank_tol * std::max(1.0, smax);
    add("full-dimension", full, full ? 0.0 : 1.0);
  }
  return rep;
}

void require_valid(const StateSpace& K, const Config& cfg) {
  ValidationReport rep = validate(K, cfg);
  if (rep.pass) return;
  std::string names;
  for (const auto& i : rep.issues)
    if (!i.pass) names += (names.empty() ? "" : ", ") + i.invariant;
  fail(ErrorKind::Degenerate, "state space '" + K.label + "' fails validation: " + names);
}

StateSpace simplex_space(int k) {
  if (k < 1) fail(ErrorKind::ShapeMismatch, "simplex needs at least one vertex");
  StateSpace K;
  K.dim = k;
  K.label = "simplex-" + std::to_string(k);
  K.unit = Vec::Ones(k);
  for (int i = 0; i < k; ++i) {
    Vec e = Vec::Zero(k);
    e[i] = 1.0;
    K.vertices.push_back(e);
    K.facets.push_back(e);
  }
  return K;
}

StateSpace square_space() {
  StateSpace K;
  K.dim = 3;
  K.label = "square";
  K.unit = Vec::Zero(3);
  K.unit[0] = 1.0;
  for (double s : {1.0, -1.0})
    for (double t : {1.0, -1.0}) {
      Vec v(3);
      v << 1.0, s, t;
      K.vertices.push_back(v);
    }
  for (double s : {1.0, -1.0}) {
    Vec f(3), g(3);
    f << 0.5, 0.5 * s, 0.0;
    g << 0.5, 0.0, 0.5 * s;
    K.facets.push_back(f);
    K.facets.push_back(g);
  }
  return K;
}

StateSpace polygon_space(int sides) {
  if (sides < 3) fail(ErrorKind::ShapeMismatch, "polygon needs at least 3 sides");
  StateSpace K;
  K.dim = 3;
  K.label = "polygon-" + std::to_string(sides);
  K.unit = Vec::Zero(3);
  K.unit[0] = 1.0;
  const double pi = std::numbers::pi;
  for (int k = 0; k < sides; ++k) {
    const double th = 2.0 * pi * k / sides;
    Vec v(3);
    v << 1.0, std::cos(th), std::sin(th);
    K.vertices.push_back(v);
  }
  const double apothem = std::cos(pi / sides);
  for (int k = 0; k < sides; ++k) {
    const double ph = 2.0 * pi * (k + 0.5) / sides;
    Vec f(3);
    f << apothem, -std::cos(ph), -std::sin(ph);
    K.facets.push_back(f);
  }
  return K;
}

Vec barycenter(const StateSpace& K) {
  Vec b = Vec::Zero(K.dim);
  for (const Vec& v : K.vertices) b += v;
  return b / K.num_vertices();
}

bool contains(const StateSpace& K, const Vec& x, double tol) {
  if (x.size() != K.dim) return false;
  if (std::abs(K.unit.dot(x) - 1.0) > tol) return false;
  for (const Vec& f : K.facets)
    if (f.dot(x) < -tol) return false;
  return true;
}

bool is_interior(const StateSpace& K, const Vec& x, const Config& cfg) {
  if (x.size() != K.dim) return false;
  for (const Vec& f : K.facets) {
    double scale = 0.0;
    for (const Vec& v : K.vertices) scale = std::max(scale, std::abs(f.dot(v)));
    if (f.dot(x) <= cfg.interior_tol * std::max(1.0, scale)) return false;
  }
  return true;
}

Vec random_state(const StateSpace& K, Rng& rng, double interior_mix) {
  Vec x = Vec::Zero(K.dim);
  double total = 0.0;
  for (const Vec& v : K.vertices) {
    const double w = -std::log(std::max(rng.uniform(), 1e-300));
    x += w * v;
    total += w;
  }
  x /= total;
  if (interior_mix > 0.0) x = (1.0 - interior_mix) * x + interior_mix * barycenter(K);
  return x;
}

namespace {

// max f(z) over 0 <= f(v) <= 1 for all vertices v.
LinearProgram effect_lp(const StateSpace& K, const Vec& z) {
  const int d = K.dim;
  const int nv = K.num_vertices();
  LinearProgram lp;
  lp.name = "effect-sup:" + K.label;
  lp.sense = LinearProgram::Sense::Max;
  lp.objective = z;
  lp.ge_A = Mat(2 * nv, d);
  lp.ge_b = Vec(2 * nv);
  for (int i = 0; i < nv; ++i) {
    lp.ge_A.row(2 * i) = K.vertices[i];
    lp.ge_b[2 * i] = 0.0;
    lp.ge_A.row(2 * i + 1) = -K.vertices[i];
    lp.ge_b[2 * i + 1] = -1.0;
  }
  return lp;
}

void require_interior_denominator(const StateSpace& K, const Vec& y, const Config& cfg,
                                  const char* who) {
  for (const Vec& f : K.facets) {
    double scale = 0.0;
    for (const Vec& v : K.vertices) scale = std::max(scale, std::abs(f.dot(v)));
    if (f.dot(y) <= cfg.interior_tol * std::max(1.0, scale))
      fail(ErrorKind::NotInterior,
           std::string(who) + ": reference point lies on the boundary of '" + K.label + "'");
  }
}

Mat kron(const Mat& A, const Mat& B) {
  Mat K(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

}  // namespace

double effect_sup(const StateSpace& K, const Vec& z, const Config& cfg) {
  return effect_sup_argmax(K, z, cfg).first;
}

std::pair<double, Vec> effect_sup_argmax(const StateSpace& K, const Vec& z, const Config& cfg) {
  if (z.size() != K.dim) fail(ErrorKind::ShapeMismatch, "effect_sup: wrong dimension");
  Solution s = solve_optimal(effect_lp(K, z), cfg);
  return {s.objective, s.x};
}

double base_dual_norm(const StateSpace& K, const Vec& z, const Config& cfg) {
  if (z.size() != K.dim) fail(ErrorKind::ShapeMismatch, "base_dual_norm: wrong dimension");
  const int nv = K.num_vertices();
  LinearProgram lp;
  lp.name = "base-dual-norm:" + K.label;
  lp.objective = Vec::Ones(2 * nv);
  lp.eq_A = Mat(K.dim, 2 * nv);
  for (int i = 0; i < nv; ++i) {
    lp.eq_A.col(i) = K.vertices[i];
    lp.eq_A.col(nv + i) = -K.vertices[i];
  }
  lp.eq_b = z;
  lp.lb = Vec::Zero(2 * nv);
  Solution s = solve_optimal(lp, cfg);
  return s.objective;
}

std::pair<double, double> order_bounds(const StateSpace& K, const Vec& x, const Vec& y,
                                       const Config& cfg) {
  if (x.size() != K.dim || y.size() != K.dim)
    fail(ErrorKind::ShapeMismatch, "order_bounds: wrong dimension");
  require_interior_denominator(K, y, cfg, "order_bounds");
  double mu = kInf, lambda = -kInf;
  for (const Vec& f : K.facets) {
    const double r = f.dot(x) / f.dot(y);
    mu = std::min(mu, r);
    lambda = std::max(lambda, r);
  }
  return {mu, lambda};
}

double lambda_for_tau(const StateSpace& K, const Vec& tau, const Config& cfg) {
  if (tau.size() != K.dim) fail(ErrorKind::ShapeMismatch, "lambda_for_tau: wrong dimension");
  require_interior_denominator(K, tau, cfg, "lambda_for_tau");
  double lambda = 0.0;
  for (const Vec& f : K.facets) {
    double top = 0.0;
    for (const Vec& v : K.vertices) top = std::max(top, f.dot(v));
    lambda = std::max(lambda, top / f.dot(tau));
  }
  return lambda;
}

TauResult optimize_tau(const StateSpace& K, const Config& cfg) {
  require_valid(K, cfg);
  const int d = K.dim;
  const int nf = K.num_facets();
  Vec bary = barycenter(K);
  if (!is_interior(K, bary, cfg))
    fail(ErrorKind::Degenerate, "optimize_tau: '" + K.label + "' has an empty relative interior");

  Vec tops(nf);
  for (int i = 0; i < nf; ++i) {
    double top = 0.0;
    for (const Vec& v : K.vertices) top = std::max(top, K.facets[i].dot(v));
    tops[i] = top;
  }

  // Feasibility of {exists tau in K : t*f_i(tau) >= max_v f_i(v)} as an LP
  // maximizing the uniform slack.
  auto probe = [&](double t, Vec* tau_out) {
    LinearProgram lp;
    lp.name = "tau-feasibility:" + K.label;
    lp.sense = LinearProgram::Sense::Max;
    lp.objective = Vec::Zero(d + 1);
    lp.objective[d] = 1.0;
    lp.eq_A = Mat::Zero(1, d + 1);
    lp.eq_A.row(0).head(d) = K.unit;
    lp.eq_b = Vec::Ones(1);
    lp.ge_A = Mat::Zero(2 * nf, d + 1);
    lp.ge_b = Vec::Zero(2 * nf);
    for (int i = 0; i < nf; ++i) {
      lp.ge_A.row(i).head(d) = t * K.facets[i];
      lp.ge_A(i, d) = -1.0;
      lp.ge_b[i] = tops[i];
      lp.ge_A.row(nf + i).head(d) = K.facets[i];
    }
    Solution s = solve(lp, cfg);
    if (!s.optimal() || s.x[d] < -1e-10) return false;
    if (tau_out) *tau_out = s.x.head(d);
    return true;
  };

  double hi = lambda_for_tau(K, bary, cfg);
  double lo = 1.0;
  Vec best = bary;
  probe(hi * (1.0 + 1e-12), &best);
  while (hi - lo > cfg.bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    Vec tau;
    if (probe(mid, &tau)) {
      hi = mid;
      best = tau;
    } else {
      lo = mid;
    }
  }

  TauResult res;
  res.tau = (1.0 - 1e-9) * best + 1e-9 * bary;
  res.lambda = lambda_for_tau(K, res.tau, cfg);
  return res;
}

Measurement ic_measurement(const StateSpace& K, const Config& cfg) {
  const int d = K.dim;
  const int nv = K.num_vertices();

  // Covector basis {a_1..a_{d-1}, unit}: greedily extend the unit row by
  // facet covectors, then coordinate covectors.
  std::vector<Vec> basis = {Vec(K.unit.normalized())};
  auto try_add = [&](const Vec& cand) {
    if (static_cast<int>(basis.size()) == d) return;
    Mat B(basis.size() + 1, d);
    for (size_t i = 0; i < basis.size(); ++i) B.row(i) = basis[i];
    B.row(basis.size()) = cand.normalized();
    Eigen::ColPivHouseholderQR<Mat> qr(B.transpose());
    qr.setThreshold(1e-9);
    if (qr.rank() == static_cast<int>(basis.size()) + 1) basis.push_back(cand.normalized());
  };
  for (const Vec& f : K.facets) try_add(f);
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e[i] = 1.0;
    try_add(e);
  }
  if (static_cast<int>(basis.size()) != d)
    fail(ErrorKind::RankDeficient, "ic_measurement: no spanning covector basis for '" + K.label + "'");

  // Center each direction on the body and take the largest epsilon keeping
  // 0 <= h_i <= (2/d) on vertices, halved.
  std::vector<Vec> dirs;
  std::vector<double> eps;
  for (int i = 1; i < d; ++i) {
    Vec a = basis[i];
    double mean = 0.0;
    for (const Vec& v : K.vertices) mean += a.dot(v);
    a -= (mean / nv) * K.unit;
    double amp = 0.0;
    for (const Vec& v : K.vertices) amp = std::max(amp, std::abs(a.dot(v)));
    if (amp < 1e-12) fail(ErrorKind::RankDeficient, "ic_measurement: degenerate basis direction");
    dirs.push_back(a);
    eps.push_back(0.5 / amp);
  }

  // Shrink jointly so the closing effect stays strictly inside E(K).
  double s_amp = 0.0;
  for (const Vec& v : K.vertices) {
    double s = 0.0;
    for (size_t i = 0; i < dirs.size(); ++i) s += eps[i] * dirs[i].dot(v);
    s_amp = std::max(s_amp, std::abs(s));
  }
  if (s_amp > 0.5) {
    const double shrink = 0.5 / s_amp;
    for (double& e : eps) e *= shrink;
  }

  Measurement M;
  M.outcome_count = d;
  Vec sum = Vec::Zero(d);
  for (size_t i = 0; i < dirs.size(); ++i) {
    Vec h = (K.unit + eps[i] * dirs[i]) / d;
    M.effects.push_back({h});
    sum += h;
  }
  M.effects.push_back({Vec(K.unit - sum)});

  for (const auto& e : M.effects)
    for (const Vec& v : K.vertices) {
      const double val = e.vector.dot(v);
      if (val < -cfg.tol || val > 1.0 + cfg.tol)
        fail(ErrorKind::RankDeficient, "ic_measurement: closing effect escaped E(K)");
    }

  Eigen::JacobiSVD<Mat> svd(M.matrix());
  const auto& sv = svd.singularValues();
  if (sv[sv.size() - 1] <= cfg.rank_tol * std::max(1.0, sv[0]))
    fail(ErrorKind::RankDeficient, "ic_measurement: effect matrix is rank deficient");
  return M;
}

InjectivityResult injectivity_constant(const StateSpace& A, const StateSpace& B,
                                       const Measurement& M_A, const Measurement& M_B,
                                       const std::vector<Vec>& bipartite_vertices,
                                       const Config& cfg) {
  const int dA = A.dim, dB = B.dim;
  const int D = dA * dB;
  const Mat TA = M_A.matrix();
  const Mat TB = M_B.matrix();
  if (TA.cols() != dA || TB.cols() != dB)
    fail(ErrorKind::ShapeMismatch, "injectivity_constant: measurement dimensions");

  Mat T = kron(TA, TB);

  // Restriction to the trace-difference subspace {unit_AB(z) = 0}.
  Vec unit_ab(D);
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dB; ++j) unit_ab[i * dB + j] = A.unit[i] * B.unit[j];
  Eigen::JacobiSVD<Mat> ker(Mat(unit_ab.transpose()), Eigen::ComputeFullV);
  Mat Qz = ker.matrixV().rightCols(D - 1);

  Eigen::JacobiSVD<Mat> svd(Mat(T * Qz));
  const double sigma = svd.singularValues()[svd.singularValues().size() - 1];
  if (sigma <= cfg.rank_tol)
    fail(ErrorKind::RankDeficient, "injectivity_constant: measurement pair is not injective");

  // Output norm ball: classical bipartite simplex with unit-vector vertices.
  const double r_out = 1.0;

  InjectivityResult res;
  res.sigma_min = sigma;
  res.alpha = 1.0 / r_out;

  constexpr int kExactMaxVerts = 16;
  constexpr int kExactMaxDim = 8;
  auto factor_inradius = [&](const std::vector<Vec>& verts) {
    if (static_cast<int>(verts.size()) <= 2 * kExactMaxVerts &&
        static_cast<int>(verts[0].size()) <= kExactMaxDim) {
      try {
        return inradius_symmetric_exact(verts, cfg);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::EnumerationOverflow) throw;
      }
    }
    return inradius_symmetric_lower_lp(verts, cfg);
  };
  if (!bipartite_vertices.empty() &&
      static_cast<int>(bipartite_vertices.size()) <= kExactMaxVerts && D <= kExactMaxDim) {
    res.beta = inradius_symmetric_exact(bipartite_vertices, cfg);
    res.conservative = false;
  } else {
    // Tensor-factor fallback: the bipartite ball contains the projective
    // tensor of the factor balls; an SVD argument bounds its inradius below.
    const double rA = factor_inradius(A.vertices);
    const double rB = factor_inradius(B.vertices);
    res.beta = rA * rB / std::sqrt(static_cast<double>(std::min(dA, dB)));
    res.conservative = true;
  }
  res.value = res.alpha * res.sigma_min * res.beta;
  return res;
}

}  // namespace definetti
