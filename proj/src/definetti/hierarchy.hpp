#ifndef DEFINETTI_HIERARCHY_HPP
#define DEFINETTI_HIERARCHY_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "entropy.hpp"
#include "geometry.hpp"
#include "tensor.hpp"

namespace definetti {

/// Bilinear minimization over product states with local equality and
/// inequality blocks, all maps in homogeneous coordinates:
///   min P(x_A x x_B)  s.t.  F_A x_A = 0, F_B x_B = 0,
///                           G_A x_A >= 0, G_B x_B >= 0.
struct LocalProblem {
  StateSpace A;
  StateSpace B;
  Vec P;    // covector on V_A tensor V_B, row-major (i, k)
  Mat F_A;  // may have zero rows
  Mat F_B;
  Mat G_A;
  Mat G_B;
  std::string label;

  void check(const Config& cfg = Config()) const;
};

struct SolverStats {
  std::string status;
  int iterations = 0;
};

struct OuterReport {
  int level = 0;
  double value = 0.0;  // the outer bound p_n
  SymExtension y_opt;
  Vec x_AB;            // keep-1 marginal of the optimizer
  double p_norm = 0.0;
  bool p_norm_conservative = false;
  double error_bound = 0.0;  // 2 ||P|| c(A,B) / sqrt(n)
  DeFinettiConstants constants;
  SolverStats solver;
};

/// Assembles the level-n relaxation as one LP over the symmetric-basis
/// coefficients: maximal-tensor positivity against all facet multisets,
/// normalization, the equality blocks on the A factor and the first B
/// factor, and the inequality blocks paired with facet multisets.
LinearProgram build_level(const LocalProblem& problem, int n, const Config& cfg = Config());

/// Solves the level-n relaxation and attaches the certified error bar.
/// Throws Error(InfeasibleRelaxation) when the relaxation is empty, which
/// certifies infeasibility of the original problem.
OuterReport solve_level(const LocalProblem& problem, int n, const Config& cfg = Config());

/// Levels 1..n_max with the outer-monotonicity assertion; `on_report` fires
/// after each level (persistence hooks in).
std::vector<OuterReport> run_schedule(const LocalProblem& problem, int n_max,
                                      const Config& cfg = Config(),
                                      const std::function<void(const OuterReport&)>& on_report = {});

/// Order-unit norm of the objective on the bipartite space: exact vertex
/// maximum when the product vertex enumeration is affordable, otherwise a
/// certified coordinate-box bound (flagged conservative).
std::pair<double, bool> objective_norm(const LocalProblem& problem, const Config& cfg = Config());

/// Conic lift K = T(C cap {R y = r}) of one side; the cone is polyhedral,
/// given by its H-representation.
struct LiftData {
  Mat cone_facets;  // rows: facet covectors of C in R^m
  Mat T;            // m -> dim(K), homogeneous target coordinates
  Mat R;            // slice map
  Vec r;            // slice value
};

LiftData identity_lift(const StateSpace& K);

/// Substitutes both sides by their lifts: the result is an equivalent
/// LocalProblem over the lifted bodies, ready for build_level. Validates the
/// lift by mapping every lifted vertex into K and expressing every K-vertex
/// over the mapped vertices; throws Error(LiftInconsistent) otherwise.
LocalProblem lift_program(const LocalProblem& problem, const LiftData& lift_A,
                          const LiftData& lift_B, const Config& cfg = Config());

}  // namespace definetti

#endif
