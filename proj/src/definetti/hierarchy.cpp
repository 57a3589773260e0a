#include "hierarchy.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "polyhedra.hpp"

namespace definetti {

void LocalProblem::check(const Config& cfg) const {
  require_valid(A, cfg);
  require_valid(B, cfg);
  if (P.size() != static_cast<long>(A.dim) * B.dim)
    fail(ErrorKind::ShapeMismatch, "LocalProblem: objective length");
  auto block = [&](const Mat& M, int d, const char* name) {
    if (M.rows() > 0 && M.cols() != d)
      fail(ErrorKind::ShapeMismatch, std::string("LocalProblem: ") + name + " column count");
  };
  block(F_A, A.dim, "F_A");
  block(F_B, B.dim, "F_B");
  block(G_A, A.dim, "G_A");
  block(G_B, B.dim, "G_B");
}

namespace {

std::vector<Vec> covector_multiset(const std::vector<Vec>& pool, const std::vector<int>& counts) {
  std::vector<Vec> gs;
  for (size_t k = 0; k < counts.size(); ++k)
    for (int c = 0; c < counts[k]; ++c) gs.push_back(pool[k]);
  return gs;
}

}  // namespace

LinearProgram build_level(const LocalProblem& problem, int n, const Config& cfg) {
  problem.check(cfg);
  if (n < 1) fail(ErrorKind::ShapeMismatch, "build_level: level must be >= 1");
  if (n > cfg.cap_level)
    fail(ErrorKind::DimensionOverflow,
         "level " + std::to_string(n) + " exceeds cap " + std::to_string(cfg.cap_level));

  const int d_A = problem.A.dim;
  const int d_B = problem.B.dim;
  const int m_A = problem.A.num_facets();
  const int m_B = problem.B.num_facets();

  SymBasis basis = sym_index(d_B, n, cfg);
  const int S = basis.size();
  const long nvar = static_cast<long>(d_A) * S;
  if (nvar > cfg.cap_enum)
    fail(ErrorKind::DimensionOverflow, "level variable count " + std::to_string(nvar));

  SymBasis facet_sets = sym_index(m_B, n, cfg);
  SymBasis facet_sets_m1 = sym_index(m_B, n - 1, cfg);
  SymBasis basis_m1 = sym_index(d_B, n - 1, cfg);

  const long rows_pos = static_cast<long>(m_A + problem.G_A.rows()) * facet_sets.size();
  const long rows_ineq2d = static_cast<long>(m_A) * problem.G_B.rows() * facet_sets_m1.size();
  if (rows_pos + rows_ineq2d > cfg.cap_enum)
    fail(ErrorKind::DimensionOverflow, "level constraint count exceeds cap");

  auto var = [S](int i, int a) { return i * S + a; };

  LinearProgram lp;
  lp.name = problem.label + ":level-" + std::to_string(n);
  lp.objective = Vec::Zero(nvar);

  // Objective: P on the keep-1 marginal. Coefficient of y[i, alpha] is
  // sum_k P(i,k) U(alpha - e_k) with U the full unit contraction weight.
  {
    std::vector<double> unit_weight(basis_m1.size());
    for (int a = 0; a < basis_m1.size(); ++a) {
      const auto& delta = basis_m1.multisets[a];
      double w = multiset_arrangements(delta);
      for (int k = 0; k < d_B; ++k)
        for (int c = 0; c < delta[k]; ++c) w *= problem.B.unit[k];
      unit_weight[a] = w;
    }
    for (int i = 0; i < d_A; ++i)
      for (int a = 0; a < basis.size(); ++a) {
        std::vector<int> alpha = basis.multisets[a];
        double c = 0.0;
        for (int k = 0; k < d_B; ++k) {
          if (alpha[k] == 0) continue;
          --alpha[k];
          c += problem.P[i * d_B + k] * unit_weight[basis_m1.index_of(alpha)];
          ++alpha[k];
        }
        lp.objective[var(i, a)] = c;
      }
  }

  std::vector<Eigen::RowVectorXd> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<Eigen::RowVectorXd> ge_rows;

  // Normalization (1_A x 1_B^n)(y) = 1.
  {
    std::vector<Vec> units(n, problem.B.unit);
    Vec row = sym_pairing_row(units, basis);
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nvar);
    for (int i = 0; i < d_A; ++i)
      for (int a = 0; a < S; ++a) r[var(i, a)] = problem.A.unit[i] * row[a];
    eq_rows.push_back(r);
    eq_rhs.push_back(1.0);
  }

  // F_A on the A factor against every basis multiset.
  for (int fr = 0; fr < problem.F_A.rows(); ++fr)
    for (int a = 0; a < S; ++a) {
      Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nvar);
      for (int i = 0; i < d_A; ++i) r[var(i, a)] = problem.F_A(fr, i);
      eq_rows.push_back(r);
      eq_rhs.push_back(0.0);
    }

  // F_B on the first B factor against A-basis x Sym^{n-1} functionals.
  for (int fr = 0; fr < problem.F_B.rows(); ++fr)
    for (int i = 0; i < d_A; ++i)
      for (int b = 0; b < basis_m1.size(); ++b) {
        Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nvar);
        std::vector<int> alpha = basis_m1.multisets[b];
        for (int k = 0; k < d_B; ++k) {
          ++alpha[k];
          r[var(i, basis.index_of(alpha))] += problem.F_B(fr, k);
          --alpha[k];
        }
        eq_rows.push_back(r);
        eq_rhs.push_back(0.0);
      }

  // Positivity of the extension against A-facets x B-facet multisets, and
  // the G_A block against the same B side.
  {
    std::vector<Vec> a_rows;
    for (const Vec& f : problem.A.facets) a_rows.push_back(f);
    for (int gr = 0; gr < problem.G_A.rows(); ++gr) a_rows.push_back(problem.G_A.row(gr));

    for (int g = 0; g < facet_sets.size(); ++g) {
      std::vector<Vec> gs = covector_multiset(problem.B.facets, facet_sets.multisets[g]);
      Vec pair_row = sym_pairing_row(gs, basis);
      for (const Vec& fa : a_rows) {
        Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nvar);
        for (int i = 0; i < d_A; ++i) {
          if (fa[i] == 0.0) continue;
          for (int a = 0; a < S; ++a) r[var(i, a)] = fa[i] * pair_row[a];
        }
        ge_rows.push_back(r);
      }
    }
  }

  // G_B on the first factor against A-facets x B-facet multisets of n-1.
  for (int gr = 0; gr < problem.G_B.rows(); ++gr) {
    Vec hrow = problem.G_B.row(gr);
    for (int g = 0; g < facet_sets_m1.size(); ++g) {
      std::vector<Vec> gs = covector_multiset(problem.B.facets, facet_sets_m1.multisets[g]);
      gs.insert(gs.begin(), hrow);
      Vec pair_row = sym_pairing_row(gs, basis);
      for (const Vec& fa : problem.A.facets) {
        Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nvar);
        for (int i = 0; i < d_A; ++i) {
          if (fa[i] == 0.0) continue;
          for (int a = 0; a < S; ++a) r[var(i, a)] = fa[i] * pair_row[a];
        }
        ge_rows.push_back(r);
      }
    }
  }

  lp.eq_A = Mat(eq_rows.size(), nvar);
  lp.eq_b = Vec(eq_rows.size());
  for (size_t i = 0; i < eq_rows.size(); ++i) {
    lp.eq_A.row(i) = eq_rows[i];
    lp.eq_b[i] = eq_rhs[i];
  }
  lp.ge_A = Mat(ge_rows.size(), nvar);
  lp.ge_b = Vec::Zero(ge_rows.size());
  for (size_t i = 0; i < ge_rows.size(); ++i) lp.ge_A.row(i) = ge_rows[i];
  return lp;
}

std::pair<double, bool> objective_norm(const LocalProblem& problem, const Config& cfg) {
  // The bipartite base is the H-polytope {unit(z) = 1, product facets >= 0},
  // so max_K |P| is two LPs; no vertex enumeration involved.
  const int D = problem.A.dim * problem.B.dim;
  Mat facets(problem.A.num_facets() * problem.B.num_facets(), D);
  int row = 0;
  for (const Vec& f : problem.A.facets)
    for (const Vec& g : problem.B.facets) facets.row(row++) = tensor_of(f, g);

  double norm = 0.0;
  for (double sign : {1.0, -1.0}) {
    LinearProgram lp;
    lp.name = "objective-norm:" + problem.label;
    lp.sense = LinearProgram::Sense::Max;
    lp.objective = sign * problem.P;
    lp.eq_A = Mat(1, D);
    lp.eq_A.row(0) = tensor_of(problem.A.unit, problem.B.unit);
    lp.eq_b = Vec::Ones(1);
    lp.ge_A = facets;
    lp.ge_b = Vec::Zero(facets.rows());
    Solution s = solve_optimal(lp, cfg);
    norm = std::max(norm, s.objective);
  }
  return {norm, false};
}

OuterReport solve_level(const LocalProblem& problem, int n, const Config& cfg) {
  LinearProgram lp = build_level(problem, n, cfg);
  Solution s = solve(lp, cfg);
  if (s.status == SolveStatus::Infeasible)
    fail(ErrorKind::InfeasibleRelaxation,
         "level " + std::to_string(n) + " of '" + problem.label +
             "' is infeasible; the constrained problem has no solution");
  if (!s.optimal())
    fail(ErrorKind::SolverFailure, "level " + std::to_string(n) + " returned " +
                                       std::string(solve_status_name(s.status)));

  OuterReport rep;
  rep.level = n;
  rep.value = s.objective;
  rep.solver.status = solve_status_name(s.status);
  rep.solver.iterations = s.iterations;
  rep.y_opt = SymExtension::from_flat(problem.A.dim, sym_index(problem.B.dim, n, cfg), s.x);
  rep.x_AB = partial_unit(rep.y_opt, 1, problem.B.unit).flat();

  auto [pnorm, conservative] = objective_norm(problem, cfg);
  rep.p_norm = pnorm;
  rep.p_norm_conservative = conservative;
  rep.constants = definetti_constants(ProductSpace(problem.A, problem.B, cfg),
                                      ic_measurement(problem.A, cfg),
                                      ic_measurement(problem.B, cfg), cfg);
  rep.error_bound = pnorm * definetti_bound(rep.constants, n);
  return rep;
}

std::vector<OuterReport> run_schedule(const LocalProblem& problem, int n_max, const Config& cfg,
                                      const std::function<void(const OuterReport&)>& on_report) {
  if (n_max < 1) fail(ErrorKind::ShapeMismatch, "run_schedule: n_max must be >= 1");
  std::vector<OuterReport> reports;
  for (int n = 1; n <= n_max; ++n) {
    OuterReport rep = solve_level(problem, n, cfg);
    if (!reports.empty() && rep.value < reports.back().value - cfg.tol)
      fail(ErrorKind::SolverFailure,
           "outer monotonicity violated between levels " + std::to_string(n - 1) + " and " +
               std::to_string(n));
    if (on_report) on_report(rep);
    reports.push_back(std::move(rep));
  }
  return reports;
}

LiftData identity_lift(const StateSpace& K) {
  LiftData lift;
  lift.cone_facets = K.facet_matrix();
  lift.T = Mat::Identity(K.dim, K.dim);
  lift.R = Mat(1, K.dim);
  lift.R.row(0) = K.unit;
  lift.r = Vec::Ones(1);
  return lift;
}

namespace {

struct LiftedSide {
  StateSpace body;
  Mat T_hat;  // reduced homogeneous coords -> original V
};

LiftedSide build_lift_side(const StateSpace& K, const LiftData& lift, const Config& cfg) {
  const int m = static_cast<int>(lift.cone_facets.cols());
  if (lift.T.cols() != m || lift.T.rows() != K.dim || lift.R.cols() != m ||
      lift.R.rows() != lift.r.size())
    fail(ErrorKind::ShapeMismatch, "lift data shapes for '" + K.label + "'");

  SlicedBody slice = make_sliced_body(m, lift.cone_facets, lift.R, lift.r, cfg,
                                      "lift of " + K.label);

  LiftedSide side;
  side.body.dim = slice.dim();
  side.body.label = K.label + "-lifted";
  side.body.unit = slice.unit;
  for (int i = 0; i < slice.facets.rows(); ++i) side.body.facets.push_back(slice.facets.row(i));
  side.body.vertices = slice.vertices;
  side.T_hat = lift.T * slice.embed_linear();

  // Image check: every lifted vertex must map into K ...
  std::vector<Vec> mapped;
  for (const Vec& v : side.body.vertices) {
    Vec image = side.T_hat * v;
    if (!contains(K, image, 10 * cfg.tol))
      fail(ErrorKind::LiftInconsistent,
           "a lifted slice point maps outside '" + K.label + "'");
    mapped.push_back(image);
  }
  // ... and K must be covered: each vertex of K is a convex combination of
  // mapped points.
  for (const Vec& kv : K.vertices) {
    LinearProgram lp;
    lp.name = "lift-coverage";
    const int ng = static_cast<int>(mapped.size());
    lp.objective = Vec::Zero(ng);
    lp.eq_A = Mat(K.dim + 1, ng);
    for (int i = 0; i < ng; ++i) {
      lp.eq_A.col(i).head(K.dim) = mapped[i];
      lp.eq_A(K.dim, i) = 1.0;
    }
    lp.eq_b = Vec(K.dim + 1);
    lp.eq_b.head(K.dim) = kv;
    lp.eq_b[K.dim] = 1.0;
    lp.lb = Vec::Zero(ng);
    Solution s = solve(lp, cfg);
    if (!s.optimal())
      fail(ErrorKind::LiftInconsistent,
           "the lift does not cover '" + K.label + "' (vertex unreachable)");
  }
  return side;
}

}  // namespace

LocalProblem lift_program(const LocalProblem& problem, const LiftData& lift_A,
                          const LiftData& lift_B, const Config& cfg) {
  problem.check(cfg);
  LiftedSide a = build_lift_side(problem.A, lift_A, cfg);
  LiftedSide b = build_lift_side(problem.B, lift_B, cfg);

  LocalProblem lifted;
  lifted.label = problem.label + "-lifted";
  lifted.A = a.body;
  lifted.B = b.body;

  // Pulled-back objective: P'(alpha, beta) = P(T_A alpha x T_B beta).
  Mat Pmat(problem.A.dim, problem.B.dim);
  for (int i = 0; i < problem.A.dim; ++i)
    for (int k = 0; k < problem.B.dim; ++k) Pmat(i, k) = problem.P[i * problem.B.dim + k];
  Mat Pl = a.T_hat.transpose() * Pmat * b.T_hat;
  lifted.P = Vec(static_cast<long>(Pl.rows()) * Pl.cols());
  for (int i = 0; i < Pl.rows(); ++i)
    for (int k = 0; k < Pl.cols(); ++k) lifted.P[i * Pl.cols() + k] = Pl(i, k);

  lifted.F_A = problem.F_A.rows() ? Mat(problem.F_A * a.T_hat) : Mat(0, a.body.dim);
  lifted.F_B = problem.F_B.rows() ? Mat(problem.F_B * b.T_hat) : Mat(0, b.body.dim);
  lifted.G_A = problem.G_A.rows() ? Mat(problem.G_A * a.T_hat) : Mat(0, a.body.dim);
  lifted.G_B = problem.G_B.rows() ? Mat(problem.G_B * b.T_hat) : Mat(0, b.body.dim);
  return lifted;
}

}  // namespace definetti
