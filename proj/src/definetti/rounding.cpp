#include "rounding.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace definetti {

ConditionalEnsemble conditionals(const SymExtension& y, const StateSpace& A, const StateSpace& B,
                                 const Measurement& M, int m, const Config& cfg) {
  const int n = y.n();
  if (m < 0 || m > n - 1) fail(ErrorKind::ShapeMismatch, "conditionals: need 0 <= m <= n-1");
  if (y.d_A != A.dim || y.d_B() != B.dim)
    fail(ErrorKind::ShapeMismatch, "conditionals: extension does not match the spaces");
  const int outcomes = M.outcome_count;
  double tuples = 1.0;
  for (int t = 0; t < m; ++t) {
    tuples *= outcomes;
    if (tuples > static_cast<double>(cfg.cap_enum))
      fail(ErrorKind::EnumerationOverflow, "outcome tuple count exceeds cap");
  }

  ConditionalEnsemble ens;
  ens.m = m;
  SymBasis outcome_sets = sym_index(outcomes, m, cfg);
  for (int o = 0; o < outcome_sets.size(); ++o) {
    const auto& counts = outcome_sets.multisets[o];
    SymExtension t = y;
    std::vector<int> sorted;
    for (int z = 0; z < outcomes; ++z)
      for (int c = 0; c < counts[z]; ++c) {
        t = apply_effect_on_first_factor(M.effects[z].vector, t);
        sorted.push_back(z);
      }

    Vec x_A_raw = partial_unit(t, 0, B.unit).coeffs.col(0);
    const double p_tuple = A.unit.dot(x_A_raw);
    const double weight = multiset_arrangements(counts);

    if (p_tuple < cfg.p_floor) {
      ens.dropped_mass += std::max(p_tuple, 0.0) * weight;
      continue;
    }

    SymExtension one_B = partial_unit(t, 1, B.unit);
    Vec x_B_raw = Vec::Zero(B.dim);
    for (int k = 0; k < B.dim; ++k) {
      std::vector<int> e(B.dim, 0);
      e[k] = 1;
      const int col = one_B.basis.index_of(e);
      for (int i = 0; i < A.dim; ++i) x_B_raw[k] += A.unit[i] * one_B.coeffs(i, col);
    }

    ConditionalOutcome out;
    out.outcome = sorted;
    out.probability = p_tuple * weight;
    out.x_A = x_A_raw / p_tuple;
    out.x_B = x_B_raw / p_tuple;
    ens.outcomes.push_back(std::move(out));
  }
  return ens;
}

namespace {

struct TermCheck {
  double value = 0.0;
  double residual = 0.0;
};

TermCheck certify_term(const LocalProblem& p, const Vec& x_A, const Vec& x_B) {
  TermCheck c;
  c.value = p.P.dot(tensor_of(x_A, x_B));
  double r = 0.0;
  r = std::max(r, std::abs(p.A.unit.dot(x_A) - 1.0));
  r = std::max(r, std::abs(p.B.unit.dot(x_B) - 1.0));
  for (const Vec& f : p.A.facets) r = std::max(r, -f.dot(x_A));
  for (const Vec& f : p.B.facets) r = std::max(r, -f.dot(x_B));
  for (int i = 0; i < p.F_A.rows(); ++i) r = std::max(r, std::abs(p.F_A.row(i).dot(x_A)));
  for (int i = 0; i < p.F_B.rows(); ++i) r = std::max(r, std::abs(p.F_B.row(i).dot(x_B)));
  for (int i = 0; i < p.G_A.rows(); ++i) r = std::max(r, -p.G_A.row(i).dot(x_A));
  for (int i = 0; i < p.G_B.rows(); ++i) r = std::max(r, -p.G_B.row(i).dot(x_B));
  c.residual = r;
  return c;
}

}  // namespace

InnerReport inner_search(const LocalProblem& problem, const OuterReport& outer,
                         const Measurement& M, const Config& cfg) {
  const int n = outer.y_opt.n();
  InnerReport rep;
  rep.best_value = kInf;
  rep.certified_bound = outer.error_bound;
  rep.dropped_mass = 0.0;

  for (int m = 0; m < n; ++m) {
    ConditionalEnsemble ens = conditionals(outer.y_opt, problem.A, problem.B, M, m, cfg);
    rep.dropped_mass = std::max(rep.dropped_mass, ens.dropped_mass);

    double mix_value = 0.0;
    double mix_mass = 0.0;
    double mix_residual = 0.0;
    for (const ConditionalOutcome& out : ens.outcomes) {
      TermCheck c = certify_term(problem, out.x_A, out.x_B);
      rep.worst_residual = std::max(rep.worst_residual, c.residual);
      mix_value += out.probability * c.value;
      mix_mass += out.probability;
      mix_residual = std::max(mix_residual, c.residual);
      if (c.residual <= cfg.tol && c.value < rep.best_value - 1e-15) {
        rep.best_value = c.value;
        rep.best_x_A = out.x_A;
        rep.best_x_B = out.x_B;
        rep.m_star = m;
        rep.best_outcome = out.outcome;
        rep.best_residual = c.residual;
      }
      if (c.residual <= cfg.tol) ++rep.certified_terms;
    }
    if (m == rep.m_star || (m == 0 && rep.m_star < 0)) {
      rep.mixture_value = mix_mass > 0 ? mix_value / mix_mass : 0.0;
      rep.mixture_residual = mix_residual;
    }
  }

  if (rep.m_star < 0)
    fail(ErrorKind::NoFeasibleTerm,
         "no conditional product term certified within tol " + std::to_string(cfg.tol) +
             " (worst residual " + std::to_string(rep.worst_residual) + ")");
  rep.gap_to_outer = rep.best_value - outer.value;
  return rep;
}

InnerReport inner_search(const LocalProblem& problem, const OuterReport& outer, const Config& cfg) {
  return inner_search(problem, outer, ic_measurement(problem.B, cfg), cfg);
}

}  // namespace definetti
