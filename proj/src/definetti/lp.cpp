#include "lp.hpp"
#include <cstdio>
#include <cstdlib>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <mutex>
#include <vector>

#include "errors.hpp"
#include "json.hpp"

namespace definetti {

using nlohmann::json;

void LinearProgram::check_shapes() const {
  const int n = num_vars();
  auto bad = [&](const char* what) { fail(ErrorKind::ShapeMismatch, std::string("LinearProgram ") + name + ": " + what); };
  if (n == 0) bad("no variables");
  if (!objective.allFinite()) bad("objective has non-finite entries");
  if (eq_A.rows() != eq_b.size()) bad("eq block row mismatch");
  if (ge_A.rows() != ge_b.size()) bad("ge block row mismatch");
  if (eq_A.rows() > 0 && eq_A.cols() != n) bad("eq block column mismatch");
  if (ge_A.rows() > 0 && ge_A.cols() != n) bad("ge block column mismatch");
  if (eq_A.rows() > 0 && (!eq_A.allFinite() || !eq_b.allFinite())) bad("eq block has non-finite entries");
  if (ge_A.rows() > 0 && (!ge_A.allFinite() || !ge_b.allFinite())) bad("ge block has non-finite entries");
  if (lb.size() != 0 && lb.size() != n) bad("lb size mismatch");
  if (ub.size() != 0 && ub.size() != n) bad("ub size mismatch");
}

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:    return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded:  return "Unbounded";
    case SolveStatus::Numerical:  return "Numerical";
  }
  return "Unknown";
}

namespace {

// Standard-form translation bookkeeping: original variable j is recovered as
//   x_j = shift_j + pos_col value - (neg_col value if split).
struct VarMap {
  int pos_col = -1;
  int neg_col = -1;
  double shift = 0.0;
  double sign = 1.0;  // -1 when the variable was mirrored around a finite ub
};

struct StandardForm {
  Mat A;       // m x N
  Vec b;       // >= 0
  Vec c;       // phase-2 costs (0 on slacks)
  std::vector<VarMap> vars;
  std::vector<double> row_sign;  // per original row, applied to duals
  std::vector<int> slack_col;    // per row, -1 when the row has no slack
  std::vector<int> twin_col;     // split-variable partner per column, or -1
  int m_eq = 0;
  int m_ge = 0;
  int n_struct = 0;  // columns excluding artificials
  double const_shift = 0.0;  // objective constant from variable shifting
};

StandardForm build_standard_form(const LinearProgram& lp) {
  const int n = lp.num_vars();
  const bool max_sense = lp.sense == LinearProgram::Sense::Max;
  Vec c0 = max_sense ? Vec(-lp.objective) : lp.objective;

  auto lb_of = [&](int j) { return lp.lb.size() ? lp.lb[j] : -kInf; };
  auto ub_of = [&](int j) { return lp.ub.size() ? lp.ub[j] : kInf; };

  StandardForm sf;
  sf.vars.resize(n);
  int cols = 0;
  int extra_ub_rows = 0;
  for (int j = 0; j < n; ++j) {
    const double lo = lb_of(j), hi = ub_of(j);
    VarMap& vm = sf.vars[j];
    if (std::isfinite(lo)) {
      vm.pos_col = cols++;
      vm.shift = lo;
      if (std::isfinite(hi)) ++extra_ub_rows;
    } else if (std::isfinite(hi)) {
      vm.pos_col = cols++;
      vm.shift = hi;
      vm.sign = -1.0;
    } else {
      vm.pos_col = cols++;
      vm.neg_col = cols++;
    }
  }

  const int m_eq = static_cast<int>(lp.eq_A.rows());
  const int m_ge = static_cast<int>(lp.ge_A.rows());
  const int m = m_eq + m_ge + extra_ub_rows;
  const int n_slack = m_ge + extra_ub_rows;
  const int N = cols + n_slack;

  sf.A = Mat::Zero(m, N);
  sf.b = Vec::Zero(m);
  sf.c = Vec::Zero(N);
  sf.m_eq = m_eq;
  sf.m_ge = m_ge;
  sf.n_struct = N;
  sf.row_sign.assign(m_eq + m_ge, 1.0);

  auto emit_row = [&](int row, const Vec& a, double rhs) {
    for (int j = 0; j < n; ++j) {
      const VarMap& vm = sf.vars[j];
      const double aj = a[j] * vm.sign;
      if (aj == 0.0) continue;
      sf.A(row, vm.pos_col) += aj;
      if (vm.neg_col >= 0) sf.A(row, vm.neg_col) -= aj;
      rhs -= a[j] * vm.shift;
    }
    sf.b[row] = rhs;
  };

  sf.slack_col.assign(m, -1);
  for (int r = 0; r < m_eq; ++r) emit_row(r, lp.eq_A.row(r), lp.eq_b[r]);

  int slack = cols;
  for (int r = 0; r < m_ge; ++r) {
    const int row = m_eq + r;
    emit_row(row, lp.ge_A.row(r), lp.ge_b[r]);
    sf.A(row, slack) = -1.0;
    sf.slack_col[row] = slack++;
  }

  int row = m_eq + m_ge;
  for (int j = 0; j < n; ++j) {
    const double lo = lb_of(j), hi = ub_of(j);
    if (std::isfinite(lo) && std::isfinite(hi)) {
      sf.A(row, sf.vars[j].pos_col) = 1.0;
      sf.A(row, slack) = 1.0;
      sf.slack_col[row] = slack++;
      sf.b[row] = hi - lo;
      ++row;
    }
  }

  for (int j = 0; j < n; ++j) {
    const VarMap& vm = sf.vars[j];
    sf.c[vm.pos_col] += c0[j] * vm.sign;
    if (vm.neg_col >= 0) sf.c[vm.neg_col] -= c0[j];
    sf.const_shift += c0[j] * vm.shift;
  }

  for (int r = 0; r < m; ++r) {
    if (sf.b[r] < 0.0) {
      sf.A.row(r) *= -1.0;
      sf.b[r] *= -1.0;
      if (r < m_eq + m_ge) sf.row_sign[r] = -1.0;
    }
  }

  sf.twin_col.assign(N, -1);
  for (const VarMap& vm : sf.vars) {
    if (vm.neg_col >= 0) {
      sf.twin_col[vm.pos_col] = vm.neg_col;
      sf.twin_col[vm.neg_col] = vm.pos_col;
    }
  }
  return sf;
}

// Revised simplex over the standard form with an explicit dense basis inverse.
class SimplexCore {
 public:
  SimplexCore(const Mat& A, const Vec& b, double tol, std::vector<int> twin = {})
      : A_(A),
        b_(b),
        m_(static_cast<int>(A.rows())),
        N_(static_cast<int>(A.cols())),
        tol_(tol),
        twin_(std::move(twin)) {
    if (twin_.empty()) twin_.assign(N_, -1);
    // Full refactorization is cubic; space it out on large systems.
    refactor_every_ = m_ <= 600 ? 40 : (m_ <= 1500 ? 150 : 400);
  }

  // Basis columns are indices into A_ extended by m artificial identity
  // columns [N_, N_+m).
  void init_artificial_basis() {
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) basis_[i] = N_ + i;
    rebuild_membership();
    binv_ = Mat::Identity(m_, m_);
    xb_ = b_;
  }

  // Starts from the given per-row basic columns (slacks where admissible,
  // artificials elsewhere).
  bool init_basis(const std::vector<int>& basic) {
    basis_ = basic;
    rebuild_membership();
    return refactor();
  }

  Vec column(int j) const {
    if (j < N_) return A_.col(j);
    Vec e = Vec::Zero(m_);
    e[j - N_] = 1.0;
    return e;
  }

  // Minimizes cost over the current basis. Returns Optimal, Unbounded or
  // Numerical. `cost` has length N_ + m (artificials included); artificial
  // columns are only eligible to enter when `allow_artificials` is set.
  // Optimality is only declared from a freshly refactored basis.
  SolveStatus run(const Vec& cost, bool allow_artificials, long iter_cap, int& iters,
                  bool start_bland = false) {
    bool bland = start_bland;
    int stall = 0;
    double best_obj = objective(cost);
    int since_refactor = m_;  // force a refactor before the first exit
    const int n_cols = allow_artificials ? N_ + m_ : N_;
    while (true) {
      if (++iters > iter_cap) return SolveStatus::Numerical;
      Vec y = binv_.transpose() * basic_cost(cost);
      Vec red_struct = cost.head(N_) - A_.transpose() * y;

      // Entering candidates in reduced-cost order; columns that only admit
      // noise-level pivots are passed over while a solid alternative exists.
      int enter = -1;
      if (bland) {
        for (int j = 0; j < n_cols; ++j) {
          if (in_basis_[j]) continue;
          if (j < N_ && twin_[j] >= 0 && in_basis_[twin_[j]]) continue;
          const double red = j < N_ ? red_struct[j] : cost[j] - y[j - N_];
          if (red < -tol_) { enter = j; break; }
        }
      } else {
        double best_red = -tol_;
        for (int j = 0; j < n_cols; ++j) {
          if (in_basis_[j]) continue;
          if (j < N_ && twin_[j] >= 0 && in_basis_[twin_[j]]) continue;
          const double red = j < N_ ? red_struct[j] : cost[j] - y[j - N_];
          if (red < best_red - 1e-15) {
            best_red = red;
            enter = j;
          }
        }
      }

      if (enter < 0) {
        if (since_refactor == 0) return SolveStatus::Optimal;
        if (!refactor_or_repair()) return SolveStatus::Numerical;
        since_refactor = 0;
        continue;
      }

      Vec w = binv_ * column(enter);
      int leave = choose_leaving(w, bland);
      if (leave < 0 && since_refactor > 0) {
        // Confirm an unbounded direction against a fresh inverse.
        if (!refactor_or_repair()) return SolveStatus::Numerical;
        since_refactor = 0;
        w = binv_ * column(enter);
        leave = choose_leaving(w, bland);
      }
      if (leave < 0) return SolveStatus::Unbounded;

      pivot(enter, leave, w);
      if (++since_refactor >= refactor_every_) {
        if (!refactor_or_repair()) return SolveStatus::Numerical;
        since_refactor = 0;
      }

      const double obj = objective(cost);
      if (obj < best_obj - 1e-12 * (1.0 + std::abs(best_obj))) {
        best_obj = obj;
        stall = 0;
      } else if (++stall > 200 && !bland) {
        bland = true;
        stall = 0;
      }
    }
  }

  // Ratio test over a strong pivot floor first; noise-level pivots are used
  // only when nothing better exists. Ties resolve to the lowest basis index.
  int choose_leaving(const Vec& w, bool bland) const {
    for (double floor : {1e-7, tol_}) {
      int leave = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (w[i] > floor) {
          const double ratio = std::max(xb_[i], 0.0) / w[i];
          if (leave < 0 || ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 &&
               (bland ? basis_[i] < basis_[leave] : w[i] > w[leave] * (1.0 + 1e-12)))) {
            leave = i;
            best_ratio = ratio;
          }
        }
      }
      if (leave >= 0) return leave;
    }
    return -1;
  }

  double objective(const Vec& cost) const {
    double v = 0.0;
    for (int i = 0; i < m_; ++i) v += cost[basis_[i]] * xb_[i];
    return v;
  }

  Vec basic_cost(const Vec& cost) const {
    Vec cb(m_);
    for (int i = 0; i < m_; ++i) cb[i] = cost[basis_[i]];
    return cb;
  }

  bool is_basic(int j) const { return in_basis_[j]; }

  void rebuild_membership() {
    in_basis_.assign(N_ + m_, false);
    for (int j : basis_) in_basis_[j] = true;
  }

  void pivot(int enter, int leave, const Vec& w) {
    const double piv = w[leave];
    binv_.row(leave) /= piv;
    const double t = xb_[leave] / piv;
    for (int i = 0; i < m_; ++i) {
      if (i == leave) continue;
      if (w[i] != 0.0) {
        binv_.row(i) -= w[i] * binv_.row(leave);
        xb_[i] -= w[i] * t;
      }
      if (xb_[i] < 0.0 && xb_[i] > -1e-11) xb_[i] = 0.0;
    }
    xb_[leave] = t;
    in_basis_[basis_[leave]] = false;
    in_basis_[enter] = true;
    basis_[leave] = enter;
  }

  // Fresh inverse with a probed residual check; a failure here means the
  // basis has gone numerically singular and the caller must restart.
  bool refactor() {
    Mat B(m_, m_);
    for (int i = 0; i < m_; ++i) B.col(i) = column(basis_[i]);
    Mat inv;
    if (m_ <= 600) {
      Eigen::FullPivLU<Mat> lu(B);
      if (!lu.isInvertible()) return false;
      inv = lu.inverse();
    } else {
      inv = Eigen::PartialPivLU<Mat>(B).inverse();
    }
    if (!inv.allFinite()) return false;
    const int probes = std::min(m_, 8);
    for (int k = 0; k < probes; ++k) {
      const int col = (k * 2654435761u) % m_;
      Vec e = Vec::Zero(m_);
      e[col] = 1.0;
      if ((B * (inv * e) - e).lpNorm<Eigen::Infinity>() > 1e-6) return false;
    }
    binv_ = inv;
    xb_ = binv_ * b_;
    for (int i = 0; i < m_; ++i)
      if (xb_[i] < 0.0 && xb_[i] > -1e-9) xb_[i] = 0.0;
    return true;
  }

  // When the basis has drifted into numerical singularity, crash a repaired
  // basis: keep a maximal independent subset of the current basic columns and
  // cover the remaining rows with their artificial columns. Any nonzero
  // artificial left at the end is caught by the caller's residual gate.
  bool refactor_or_repair() {
    if (refactor()) return true;
    Mat B(m_, m_);
    for (int i = 0; i < m_; ++i) B.col(i) = column(basis_[i]);
    Eigen::ColPivHouseholderQR<Mat> qr(B);
    qr.setThreshold(1e-9);
    const int rank = static_cast<int>(qr.rank());
    if (rank >= m_) return false;
    std::vector<bool> keep_col(m_, false);
    for (int k = 0; k < rank; ++k) keep_col[qr.colsPermutation().indices()[k]] = true;

    // Orthonormal basis of the kept span, then complete with the artificial
    // columns whose residual against the span is largest.
    Mat Q(m_, m_);
    int nq = 0;
    auto absorb = [&](Vec v) {
      for (int k = 0; k < nq; ++k) v -= Q.col(k).dot(v) * Q.col(k);
      const double norm = v.norm();
      if (norm < 1e-9) return false;
      Q.col(nq++) = v / norm;
      return true;
    };
    for (int i = 0; i < m_; ++i)
      if (keep_col[i]) absorb(B.col(i));
    std::vector<int> dependent;
    for (int i = 0; i < m_; ++i)
      if (!keep_col[i]) dependent.push_back(i);
    for (int slot : dependent) {
      int best_row = -1;
      double best_resid = 1e-7;
      for (int r = 0; r < m_; ++r) {
        if (in_basis_[N_ + r]) continue;
        double proj_sq = 0.0;
        for (int k = 0; k < nq; ++k) proj_sq += Q.col(k)[r] * Q.col(k)[r];
        const double resid = 1.0 - proj_sq;
        if (resid > best_resid) {
          best_resid = resid;
          best_row = r;
        }
      }
      if (best_row < 0) return false;
      Vec e = Vec::Zero(m_);
      e[best_row] = 1.0;
      if (!absorb(e)) return false;
      in_basis_[basis_[slot]] = false;
      basis_[slot] = N_ + best_row;
      in_basis_[N_ + best_row] = true;
    }
    return refactor();
  }

  // Pivots zero-valued basic artificials onto structural columns. Rows that
  // cannot be repaired are linearly dependent; their indices are returned.
  std::vector<int> drive_out_artificials() {
    std::vector<int> redundant;
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < N_) continue;
      int enter = -1;
      for (int j = 0; j < N_; ++j) {
        if (is_basic(j)) continue;
        const double wij = binv_.row(i) * A_.col(j);
        if (std::abs(wij) > 1e3 * tol_) { enter = j; break; }
      }
      if (enter >= 0) {
        Vec w = binv_ * column(enter);
        pivot(enter, i, w);
      } else {
        redundant.push_back(i);
      }
    }
    return redundant;
  }

  const std::vector<int>& basis() const { return basis_; }
  const Vec& xb() const { return xb_; }
  const Mat& binv() const { return binv_; }
  int n_struct() const { return N_; }

 private:
  const Mat& A_;
  const Vec& b_;
  int m_, N_;
  double tol_;
  std::vector<int> twin_;
  int refactor_every_ = 40;
  std::vector<int> basis_;
  std::vector<bool> in_basis_;
  Mat binv_;
  Vec xb_;
};

// One standard-form solve attempt. `row_map` maps current rows to original
// standard rows; rows found redundant in phase 1 are appended to `redundant`.
Solution solve_standard(const LinearProgram& lp, const StandardForm& sf, const Mat& A, const Vec& b,
                        const std::vector<int>& row_map, const Config& cfg,
                        std::vector<int>& redundant) {
  const int m = static_cast<int>(A.rows());
  const int N = static_cast<int>(A.cols());
  const double tol = cfg.solver_tol;
  const double scale = 1.0 + b.lpNorm<Eigen::Infinity>();
  Solution sol;

  SimplexCore core(A, b, tol, sf.twin_col);
  Vec phase1 = Vec::Zero(N + m);
  phase1.tail(m).setOnes();
  Vec phase2 = Vec::Zero(N + m);
  phase2.head(N) = sf.c;

  // Slacks serve as the starting basis wherever their sign admits it, so
  // phase 1 typically carries artificials only on equality rows.
  std::vector<int> start_basis(m);
  for (int i = 0; i < m; ++i) {
    const int sc = row_map[i] < static_cast<int>(sf.slack_col.size()) ? sf.slack_col[row_map[i]] : -1;
    if (sc >= 0 && (A(i, sc) > 0.5 || b[i] <= tol))
      start_basis[i] = sc;
    else
      start_basis[i] = N + i;
  }

  // Round 0 runs Dantzig pricing; round 1 restarts from scratch under
  // Bland's rule when the first pass ends up Numerical or claims
  // infeasibility.
  int iters = 0;
  bool solved = false;
  for (int round = 0; round < 2 && !solved; ++round) {
    const bool bland = round == 1;
    if (!core.init_basis(start_basis)) core.init_artificial_basis();
    SolveStatus st = core.run(phase1, false, bland ? 600000 : 200000, iters, bland);
    sol.iterations = iters;
    if (st != SolveStatus::Optimal) continue;
    const double infeas = core.objective(phase1);
    if (std::getenv("DEFINETTI_LP_DEBUG"))
      std::fprintf(stderr, "[lp] %s m=%d N=%d round=%d phase1=%.3e iters=%d\n", lp.name.c_str(),
                   m, N, round, infeas, iters);
    if (infeas > 1e3 * tol * scale) {
      if (!bland) continue;
      sol.status = SolveStatus::Infeasible;
      sol.residual_eq = infeas;
      return sol;
    }
    redundant = core.drive_out_artificials();
    if (!redundant.empty()) {
      sol.status = SolveStatus::Numerical;
      return sol;
    }
    st = core.run(phase2, false, bland ? 600000 : 200000, iters, bland);
    sol.iterations = iters;
    if (st == SolveStatus::Unbounded) {
      if (!bland) continue;  // re-derive under Bland before trusting it
      sol.status = st;
      return sol;
    }
    if (st == SolveStatus::Optimal) {
      // Residual gate: basis repairs may have parked mass on artificials.
      Vec x_probe = Vec::Zero(N);
      for (int i = 0; i < m; ++i)
        if (core.basis()[i] < N) x_probe[core.basis()[i]] = core.xb()[i];
      solved = (A * x_probe - b).lpNorm<Eigen::Infinity>() <= 1e3 * tol * scale;
    }
  }
  if (!solved) {
    sol.status = SolveStatus::Numerical;
    return sol;
  }

  Vec x_std = Vec::Zero(N);
  for (int i = 0; i < m; ++i)
    if (core.basis()[i] < N) x_std[core.basis()[i]] = core.xb()[i];

  const int n = lp.num_vars();
  sol.x = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    const VarMap& vm = sf.vars[j];
    double v = x_std[vm.pos_col];
    if (vm.neg_col >= 0) v -= x_std[vm.neg_col];
    sol.x[j] = vm.shift + vm.sign * v;
  }

  sol.objective = lp.objective.dot(sol.x);

  // Duals in original row order and sign convention.
  Vec y = core.binv().transpose() * core.basic_cost(phase2);
  const int orig_rows = sf.m_eq + sf.m_ge;
  Vec y_orig = Vec::Zero(orig_rows);
  for (int r = 0; r < m; ++r)
    if (row_map[r] < orig_rows) y_orig[row_map[r]] = y[r] * sf.row_sign[row_map[r]];
  const double sense = lp.sense == LinearProgram::Sense::Max ? -1.0 : 1.0;
  sol.dual_eq = sense * y_orig.head(sf.m_eq);
  sol.dual_ge = sense * y_orig.tail(sf.m_ge);

  sol.residual_eq = 0.0;
  if (lp.eq_A.rows() > 0) sol.residual_eq = (lp.eq_A * sol.x - lp.eq_b).lpNorm<Eigen::Infinity>();
  sol.residual_ge = 0.0;
  if (lp.ge_A.rows() > 0) sol.residual_ge = std::max(0.0, (lp.ge_b - lp.ge_A * sol.x).maxCoeff());

  const double primal_std = core.objective(phase2) + sf.const_shift;
  const double dual_std = y.dot(b) + sf.const_shift;
  sol.gap = std::abs(primal_std - dual_std);
  sol.status = SolveStatus::Optimal;
  return sol;
}

// Rank filter for the equality block: returns the indices of a maximal
// independent subset of rows, or nullopt when a dependent row is inconsistent
// with the kept ones (certifying infeasibility).
std::optional<std::vector<int>> independent_eq_rows(const Mat& A, const Vec& b, int m_eq) {
  std::vector<int> keep;
  if (m_eq == 0) return keep;
  Mat Et(A.cols(), m_eq);
  for (int r = 0; r < m_eq; ++r) Et.col(r) = A.row(r).transpose();
  Eigen::ColPivHouseholderQR<Mat> qr(Et);
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  const auto& perm = qr.colsPermutation().indices();
  for (int i = 0; i < rank; ++i) keep.push_back(perm[i]);
  std::sort(keep.begin(), keep.end());
  if (rank == m_eq) return keep;

  // Consistency of the dropped rows: [A|b] must have the same row rank.
  Mat Eb(m_eq, A.cols() + 1);
  Eb.leftCols(A.cols()) = A.topRows(m_eq);
  Eb.col(A.cols()) = b.head(m_eq);
  Eigen::ColPivHouseholderQR<Mat> qr_b(Eb.transpose());
  qr_b.setThreshold(1e-10);
  if (static_cast<int>(qr_b.rank()) > rank) return std::nullopt;
  return keep;
}

class BundledBackend : public LpBackend {
 public:
  std::string name() const override { return "bundled"; }

  Solution solve(const LinearProgram& lp, const Config& cfg) const override {
    lp.check_shapes();
    if (worth_dualizing(lp)) {
      Solution via_dual = solve_via_dual(lp, cfg);
      if (via_dual.status != SolveStatus::Numerical) return via_dual;
    }
    return solve_primal(lp, cfg);
  }

 private:
  // Tall bound-free problems carry a much smaller basis on the dual side.
  static bool worth_dualizing(const LinearProgram& lp) {
    const long rows = lp.eq_A.rows() + lp.ge_A.rows();
    return lp.lb.size() == 0 && lp.ub.size() == 0 && rows > 200 && rows >= 5 * lp.num_vars();
  }

  // min c.x s.t. E x = f, G x >= h  <->  max f.u + h.v s.t. E'u + G'v = c,
  // v >= 0. The x of the original problem reappears as the dual multipliers
  // of the equality rows; the mapped solution is verified before use and
  // anything suspicious falls back to the primal path.
  Solution solve_via_dual(const LinearProgram& lp, const Config& cfg) const {
    const bool max_sense = lp.sense == LinearProgram::Sense::Max;
    const Vec c = max_sense ? Vec(-lp.objective) : lp.objective;
    const int n = lp.num_vars();
    const int m_eq = static_cast<int>(lp.eq_A.rows());
    const int m_ge = static_cast<int>(lp.ge_A.rows());

    LinearProgram dual;
    dual.name = lp.name + ":dual";
    dual.sense = LinearProgram::Sense::Max;
    dual.objective = Vec(m_eq + m_ge);
    if (m_eq) dual.objective.head(m_eq) = lp.eq_b;
    if (m_ge) dual.objective.tail(m_ge) = lp.ge_b;
    dual.eq_A = Mat(n, m_eq + m_ge);
    if (m_eq) dual.eq_A.leftCols(m_eq) = lp.eq_A.transpose();
    if (m_ge) dual.eq_A.rightCols(m_ge) = lp.ge_A.transpose();
    dual.eq_b = c;
    dual.lb = Vec::Constant(m_eq + m_ge, -kInf);
    dual.lb.tail(m_ge).setZero();

    Solution d = solve_primal(dual, cfg);
    Solution out;
    out.iterations = d.iterations;
    if (d.status == SolveStatus::Unbounded) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
    if (d.status != SolveStatus::Optimal) {
      out.status = SolveStatus::Numerical;  // ambiguous; primal decides
      return out;
    }

    const double scale = 1.0 + std::abs(d.objective);
    for (double sign : {1.0, -1.0}) {
      Vec x = sign * d.dual_eq;
      double r_eq = m_eq ? (lp.eq_A * x - lp.eq_b).lpNorm<Eigen::Infinity>() : 0.0;
      double r_ge = m_ge ? std::max(0.0, (lp.ge_b - lp.ge_A * x).maxCoeff()) : 0.0;
      const double obj = c.dot(x);
      if (r_eq <= 1e-6 * scale && r_ge <= 1e-6 * scale &&
          std::abs(obj - d.objective) <= 1e-6 * scale) {
        out.status = SolveStatus::Optimal;
        out.x = x;
        out.objective = lp.objective.dot(x);
        const double flip = max_sense ? -1.0 : 1.0;
        out.dual_eq = flip * d.x.head(m_eq);
        out.dual_ge = flip * d.x.tail(m_ge);
        out.residual_eq = r_eq;
        out.residual_ge = r_ge;
        out.gap = std::abs(obj - d.objective);
        return out;
      }
    }
    out.status = SolveStatus::Numerical;
    return out;
  }

  Solution solve_primal(const LinearProgram& lp, const Config& cfg) const {
    const StandardForm sf = build_standard_form(lp);
    Mat A = sf.A;
    Vec b = sf.b;
    std::vector<int> row_map(A.rows());
    for (size_t i = 0; i < row_map.size(); ++i) row_map[i] = static_cast<int>(i);

    auto kept_eq = independent_eq_rows(A, b, sf.m_eq);
    if (!kept_eq) {
      Solution infeasible;
      infeasible.status = SolveStatus::Infeasible;
      infeasible.residual_eq = 1.0;
      return infeasible;
    }
    if (static_cast<int>(kept_eq->size()) < sf.m_eq) {
      const int total = static_cast<int>(A.rows());
      std::vector<int> rows = *kept_eq;
      for (int r = sf.m_eq; r < total; ++r) rows.push_back(r);
      Mat A2(rows.size(), A.cols());
      Vec b2(rows.size());
      std::vector<int> map2;
      for (size_t i = 0; i < rows.size(); ++i) {
        A2.row(i) = A.row(rows[i]);
        b2[i] = b[rows[i]];
        map2.push_back(rows[i]);
      }
      A = A2;
      b = b2;
      row_map = map2;
    }

    // Redundant rows discovered in phase 1 are removed and the solve restarts;
    // each restart strictly shrinks the system.
    for (int attempt = 0; attempt < 8; ++attempt) {
      std::vector<int> redundant;
      Solution sol = solve_standard(lp, sf, A, b, row_map, cfg, redundant);
      if (sol.status != SolveStatus::Numerical || redundant.empty()) return sol;

      std::vector<int> keep;
      for (int r = 0; r < A.rows(); ++r)
        if (std::find(redundant.begin(), redundant.end(), r) == redundant.end()) keep.push_back(r);
      Mat A2(keep.size(), A.cols());
      Vec b2(keep.size());
      std::vector<int> map2;
      for (size_t i = 0; i < keep.size(); ++i) {
        A2.row(i) = A.row(keep[i]);
        b2[i] = b[keep[i]];
        map2.push_back(row_map[keep[i]]);
      }
      A = A2;
      b = b2;
      row_map = map2;
    }
    Solution bad;
    bad.status = SolveStatus::Numerical;
    return bad;
  }
};

std::map<std::string, std::shared_ptr<LpBackend>>& backend_registry() {
  static std::map<std::string, std::shared_ptr<LpBackend>> reg;
  return reg;
}

std::mutex& backend_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

void register_backend(const std::string& name, std::shared_ptr<LpBackend> backend) {
  std::lock_guard<std::mutex> lock(backend_mutex());
  backend_registry()[name] = std::move(backend);
}

Solution solve(const LinearProgram& lp, const Config& cfg) {
  std::shared_ptr<LpBackend> backend;
  {
    std::lock_guard<std::mutex> lock(backend_mutex());
    auto it = backend_registry().find(cfg.backend);
    if (it != backend_registry().end()) backend = it->second;
  }
  Solution sol;
  if (backend) {
    sol = backend->solve(lp, cfg);
  } else {
    if (cfg.backend != "bundled" && !cfg.backend.empty())
      fail(ErrorKind::SolverFailure, "unknown backend '" + cfg.backend + "'");
    static BundledBackend bundled;
    sol = bundled.solve(lp, cfg);
  }
  if (sol.status == SolveStatus::Numerical)
    fail(ErrorKind::SolverFailure, "LP '" + lp.name + "' failed numerically after " +
                                       std::to_string(sol.iterations) + " iterations");
  return sol;
}

Solution solve_optimal(const LinearProgram& lp, const Config& cfg) {
  Solution sol = solve(lp, cfg);
  if (!sol.optimal())
    fail(ErrorKind::SolverFailure,
         "LP '" + lp.name + "' expected Optimal, got " + solve_status_name(sol.status));
  return sol;
}

namespace {

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) rows.push_back(vec_to_json(m.row(r)));
  return rows;
}

Vec vec_from_json(const json& a) {
  Vec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

Mat mat_from_json(const json& rows, int cols_hint) {
  if (rows.empty()) return Mat(0, cols_hint);
  Mat m(rows.size(), rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c].get<double>();
  return m;
}

}  // namespace

std::string lp_to_json(const LinearProgram& lp) {
  json j;
  j["name"] = lp.name;
  j["sense"] = lp.sense == LinearProgram::Sense::Min ? "min" : "max";
  j["c"] = vec_to_json(lp.objective);
  j["A_eq"] = mat_to_json(lp.eq_A);
  j["b_eq"] = vec_to_json(lp.eq_b);
  j["A_ge"] = mat_to_json(lp.ge_A);
  j["b_ge"] = vec_to_json(lp.ge_b);
  auto bounds = [&](const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) {
      if (std::isfinite(v[i])) a.push_back(v[i]);
      else a.push_back(nullptr);
    }
    return a;
  };
  j["lb"] = bounds(lp.lb);
  j["ub"] = bounds(lp.ub);
  return j.dump();
}

LinearProgram lp_from_json(const std::string& text) {
  json j = json::parse(text);
  LinearProgram lp;
  lp.name = j.value("name", "");
  lp.sense = j.value("sense", "min") == "max" ? LinearProgram::Sense::Max : LinearProgram::Sense::Min;
  lp.objective = vec_from_json(j.at("c"));
  const int n = lp.num_vars();
  lp.eq_A = mat_from_json(j.value("A_eq", json::array()), n);
  lp.eq_b = vec_from_json(j.value("b_eq", json::array()));
  lp.ge_A = mat_from_json(j.value("A_ge", json::array()), n);
  lp.ge_b = vec_from_json(j.value("b_ge", json::array()));
  auto bounds = [&](const json& a, double fill) {
    if (a.empty()) return Vec();
    Vec v(a.size());
    for (size_t i = 0; i < a.size(); ++i) v[i] = a[i].is_null() ? fill : a[i].get<double>();
    return v;
  };
  lp.lb = bounds(j.value("lb", json::array()), -kInf);
  lp.ub = bounds(j.value("ub", json::array()), kInf);
  return lp;
}

std::string solution_to_json(const Solution& s) {
  json j;
  j["status"] = solve_status_name(s.status);
  j["x"] = vec_to_json(s.x);
  j["objective"] = s.objective;
  j["dual_eq"] = vec_to_json(s.dual_eq);
  j["dual_ge"] = vec_to_json(s.dual_ge);
  j["residual_eq"] = s.residual_eq;
  j["residual_ge"] = s.residual_ge;
  j["gap"] = s.gap;
  j["iterations"] = s.iterations;
  return j.dump();
}

Solution solution_from_json(const std::string& text) {
  json j = json::parse(text);
  Solution s;
  const std::string st = j.value("status", "Numerical");
  if (st == "Optimal") s.status = SolveStatus::Optimal;
  else if (st == "Infeasible") s.status = SolveStatus::Infeasible;
  else if (st == "Unbounded") s.status = SolveStatus::Unbounded;
  else s.status = SolveStatus::Numerical;
  s.x = vec_from_json(j.value("x", json::array()));
  s.objective = j.value("objective", 0.0);
  s.dual_eq = vec_from_json(j.value("dual_eq", json::array()));
  s.dual_ge = vec_from_json(j.value("dual_ge", json::array()));
  s.residual_eq = j.value("residual_eq", 0.0);
  s.residual_ge = j.value("residual_ge", 0.0);
  s.gap = j.value("gap", 0.0);
  s.iterations = j.value("iterations", 0);
  return s;
}

Solution JsonAdapterBackend::solve(const LinearProgram& lp, const Config& cfg) const {
  (void)cfg;
  return solution_from_json(transport_(lp_to_json(lp)));
}

}  // namespace definetti
