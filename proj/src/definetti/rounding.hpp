#ifndef DEFINETTI_ROUNDING_HPP
#define DEFINETTI_ROUNDING_HPP

#include <vector>

#include "config.hpp"
#include "hierarchy.hpp"

namespace definetti {

/// One measurement record on m of the B copies. Outcomes are stored as
/// sorted multisets; symmetry of the extension makes every arrangement of a
/// multiset produce the same conditional pair, so `probability` aggregates
/// all of them.
struct ConditionalOutcome {
  std::vector<int> outcome;  // outcome multiset, sorted
  double probability = 0.0;
  Vec x_A;
  Vec x_B;
};

struct ConditionalEnsemble {
  int m = 0;
  std::vector<ConditionalOutcome> outcomes;
  double dropped_mass = 0.0;  // total probability of outcomes under p_floor
};

/// Measures m B-copies of the extension with M and normalizes the surviving
/// conditional pairs. Requires m <= n-1 so a B factor remains.
ConditionalEnsemble conditionals(const SymExtension& y, const StateSpace& A, const StateSpace& B,
                                 const Measurement& M, int m, const Config& cfg = Config());

struct InnerReport {
  double best_value = 0.0;  // objective of the best certified product term
  Vec best_x_A;
  Vec best_x_B;
  int m_star = -1;
  std::vector<int> best_outcome;
  double best_residual = 0.0;     // worst constraint residual of the best term
  int certified_terms = 0;
  double worst_residual = 0.0;    // across all inspected terms

  double mixture_value = 0.0;     // value of the ensemble mixture at m_star
  double mixture_residual = 0.0;  // worst term residual inside that mixture

  double gap_to_outer = 0.0;
  double certified_bound = 0.0;   // ||P|| * 2 c(A,B) / sqrt(n)
  double dropped_mass = 0.0;
};

/// Rounds the level-n optimizer: sweeps every m in 0..n-1 and every retained
/// outcome, certifies feasibility of each conditional product pair for the
/// original problem, and returns the smallest certified value together with
/// the mixture diagnostics. Throws Error(NoFeasibleTerm) when nothing
/// certifies within cfg.tol (a tolerance misconfiguration, not a theory
/// failure).
InnerReport inner_search(const LocalProblem& problem, const OuterReport& outer,
                         const Measurement& M, const Config& cfg = Config());

/// Convenience overload rounding with ic_measurement on the B side.
InnerReport inner_search(const LocalProblem& problem, const OuterReport& outer,
                         const Config& cfg = Config());

}  // namespace definetti

#endif
