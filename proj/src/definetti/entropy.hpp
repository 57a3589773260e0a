#ifndef DEFINETTI_ENTROPY_HPP
#define DEFINETTI_ENTROPY_HPP

#include <string>

#include "config.hpp"
#include "geometry.hpp"
#include "tensor.hpp"

namespace definetti {

/// Relative entropy of cone elements with a numerical enclosure. `mu` and
/// `lambda` are the order bounds the reduction ran with.
struct EntropyResult {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double mu = 0.0;
  double lambda = 0.0;
  std::string method;
};

/// D(x||y) through the order-bound reduction: the integrand
/// h(s) = sup_{f in E(K)} (s f(y) - f(x)) is convex piecewise linear, so
/// "exact-pwl" locates its pieces by a parametric walk over optimal effects
/// and integrates each piece in closed form. "adaptive" brackets the integral
/// between chord and tangent bounds at quadrature nodes in log-s.
///
/// Inputs may be arbitrary cone elements (the result is then the generalized
/// divergence, linear under joint scaling); y must be strictly interior to
/// the cone. Throws Error(NotInterior) otherwise and
/// Error(EnclosureTooWide) when "adaptive" cannot reach `enclosure_tol`.
EntropyResult relative_entropy(const StateSpace& K, const Vec& x, const Vec& y,
                               const Config& cfg = Config(),
                               const std::string& method = "exact-pwl",
                               double enclosure_tol = 1e-6);

/// Classical KL divergence in nats with 0 ln 0 = 0; requires supp(p) inside
/// supp(q).
double kl_divergence(const Vec& p, const Vec& q);

/// D(x||y) - (1/2) (sup_{f in E(K)} f(x-y))^2; nonnegative up to tolerance.
double pinsker_gap(const StateSpace& K, const Vec& x, const Vec& y, const Config& cfg = Config());

/// Upper bound on the mutual information of x_AB: D(x_AB || tau_A x x_B)
/// computed on the product space. Requires tau_A interior in A and the
/// B-marginal of x_AB interior in B.
double mutual_information_upper(const ProductSpace& P, const Vec& x_AB, const Vec& tau_A,
                                const Config& cfg = Config());

struct DeFinettiConstants {
  double lambda_A = 0.0;
  double c_A = 0.0;   // lambda_A (1 + ln lambda_A)
  double f_AB = 0.0;  // certified injectivity constant
  double c_AB = 0.0;  // sqrt(2 c_A) / f_AB
  Vec tau_A;
  bool conservative_f = false;
};

/// Constants of the finite representation bound for the pair (K_A, K_B) with
/// the given informationally complete measurements.
DeFinettiConstants definetti_constants(const ProductSpace& P, const Measurement& M_A,
                                       const Measurement& M_B, const Config& cfg = Config());

/// The bound 2 c(A,B) / sqrt(n) on the dual-base-norm distance of an
/// n-extendible state to the separable set.
double definetti_bound(const DeFinettiConstants& c, int n);

}  // namespace definetti

#endif
