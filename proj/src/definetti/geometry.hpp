#ifndef DEFINETTI_GEOMETRY_HPP
#define DEFINETTI_GEOMETRY_HPP

#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "lp.hpp"

namespace definetti {

/// A polytopal state space in homogeneous coordinates: the convex body is the
/// unit-level slice of the cone {z : f_i(z) >= 0}. Vertices carry their
/// normalization (unit(v) = 1), so affine maps on states are plain matrices.
struct StateSpace {
  int dim = 0;
  std::vector<Vec> vertices;  // extreme points, unit value 1
  std::vector<Vec> facets;    // generators of the dual cone
  Vec unit;                   // order unit covector
  std::string label;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_facets() const { return static_cast<int>(facets.size()); }
  Mat vertex_matrix() const;  // rows are vertices
  Mat facet_matrix() const;   // rows are facet covectors
};

/// An affine function K -> [0,1], stored as its covector.
struct Effect {
  Vec vector;
};

struct Measurement {
  std::vector<Effect> effects;
  int outcome_count = 0;

  /// Channel matrix into the outcome simplex; row z is the effect of
  /// outcome z.
  Mat matrix() const;
};

struct ValidationIssue {
  std::string invariant;
  bool pass = false;
  double worst = 0.0;  // magnitude of the worst violation (0 when passing)
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool pass = true;
  std::string summary() const;
};

/// Checks the four structural invariants: facet nonnegativity on vertices,
/// base normalization, unit membership in the dual cone, and full
/// dimensionality. Report-only; never throws.
ValidationReport validate(const StateSpace& K, const Config& cfg = Config());

/// Throws Error(Degenerate) listing the failing invariants.
void require_valid(const StateSpace& K, const Config& cfg = Config());

// Built-in spaces.
StateSpace simplex_space(int k);
StateSpace square_space();
StateSpace polygon_space(int sides);

/// Average of the vertices; strictly interior for validated spaces.
Vec barycenter(const StateSpace& K);

bool contains(const StateSpace& K, const Vec& x, double tol);
bool is_interior(const StateSpace& K, const Vec& x, const Config& cfg = Config());

/// Dirichlet-weighted vertex mixture, optionally pulled toward the
/// barycenter by `interior_mix`.
Vec random_state(const StateSpace& K, Rng& rng, double interior_mix = 0.0);

/// sup_{f in E(K)} f(z): the best effect value of an ambient vector. For
/// unit(z) = 0 this is half the dual base norm.
double effect_sup(const StateSpace& K, const Vec& z, const Config& cfg = Config());

/// Same LP but also returns the optimizing effect covector.
std::pair<double, Vec> effect_sup_argmax(const StateSpace& K, const Vec& z,
                                         const Config& cfg = Config());

/// Base norm of the dual pairing: min lambda + mu over decompositions
/// z = lambda p - mu q with p, q in K.
double base_dual_norm(const StateSpace& K, const Vec& z, const Config& cfg = Config());

/// Tightest (mu, lambda) with mu*y <= x <= lambda*y in the cone order;
/// requires y strictly interior.
std::pair<double, double> order_bounds(const StateSpace& K, const Vec& x, const Vec& y,
                                       const Config& cfg = Config());

/// sup_{x in K} inf{lambda : x <= lambda*tau}, finite for interior tau.
double lambda_for_tau(const StateSpace& K, const Vec& tau, const Config& cfg = Config());

struct TauResult {
  Vec tau;
  double lambda = 0.0;
};

/// Minimizes lambda_for_tau over interior tau by bisection with LP
/// feasibility subproblems; the returned lambda is certified at the
/// returned tau.
TauResult optimize_tau(const StateSpace& K, const Config& cfg = Config());

/// An informationally complete measurement with dim(K) outcomes, built from a
/// covector basis. All effects are strictly interior to E(K).
Measurement ic_measurement(const StateSpace& K, const Config& cfg = Config());

struct InjectivityResult {
  double value = 0.0;      // certified lower bound f with ||T z||_out >= f ||z||_in
  double sigma_min = 0.0;  // smallest singular value of the measurement pair
  double alpha = 0.0;      // 1 / circumradius of the output norm ball
  double beta = 0.0;       // inradius of the input norm ball (possibly a lower bound)
  bool conservative = false;
};

/// Certified injectivity constant of (M_A tensor M_B) between the bipartite
/// dual base norm and the classical output norm. `bipartite_vertices` is the
/// vertex list of the bipartite state space the input norm lives on. The
/// value only ever under-estimates the exact constant.
InjectivityResult injectivity_constant(const StateSpace& A, const StateSpace& B,
                                       const Measurement& M_A, const Measurement& M_B,
                                       const std::vector<Vec>& bipartite_vertices,
                                       const Config& cfg = Config());

}  // namespace definetti

#endif
