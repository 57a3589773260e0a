#ifndef DEFINETTI_POLYHEDRA_HPP
#define DEFINETTI_POLYHEDRA_HPP

#include <string>
#include <vector>

#include "config.hpp"
#include "lp.hpp"

namespace definetti {

/// Extreme rays of the pointed full-dimensional cone {z : A z >= 0}, by the
/// double description method with combinatorial adjacency tests. Rays are
/// returned 2-norm normalized, in a deterministic order. Throws
/// Error(Degenerate) when the rows do not describe a pointed cone and
/// Error(EnumerationOverflow) when the ray count exceeds cfg.cap_enum.
std::vector<Vec> cone_extreme_rays(const Mat& A, const Config& cfg);

/// A compact polytope {y in R^N : ineqs*y >= 0, eq_A*y = eq_b} in homogenized
/// reduced coordinates. The equality block is eliminated through an
/// orthonormal basis of its homogeneous null space; `embed` maps reduced cone
/// coordinates back to (t*y, t).
struct SlicedBody {
  int ambient = 0;
  Mat embed;                  // (N+1) x d, orthonormal columns
  Mat facets;                 // pulled-back inequality covectors, rows
  Vec unit;                   // homogenization covector in reduced coordinates
  std::vector<Vec> vertices;  // reduced, unit-normalized

  int dim() const { return static_cast<int>(embed.cols()); }

  /// Original-space point of a reduced state (unit value 1).
  Vec embed_point(const Vec& reduced) const;

  /// Homogeneous linear map from reduced coordinates to original cone
  /// coordinates t*y (the first N rows of `embed`).
  Mat embed_linear() const { return embed.topRows(ambient); }

  /// Reduced coordinates of an original-space point lying on the slice;
  /// throws Error(ShapeMismatch) if the point is off the slice.
  Vec reduce_point(const Vec& y, double tol = 1e-8) const;
};

SlicedBody make_sliced_body(int ambient, const Mat& ineqs, const Mat& eq_A, const Vec& eq_b,
                            const Config& cfg, const std::string& what);

/// Largest Euclidean norm over conv(V u -V), i.e. max_v ||v||.
double circumradius_symmetric(const std::vector<Vec>& verts);

/// Exact inradius of conv(V u -V) via vertex enumeration of its polar.
double inradius_symmetric_exact(const std::vector<Vec>& verts, const Config& cfg);

/// Certified lower bound on the inradius of conv(V u -V) from coordinate
/// cross-polytope containment; 2*dim LPs, conservative by sqrt(dim).
double inradius_symmetric_lower_lp(const std::vector<Vec>& verts, const Config& cfg);

}  // namespace definetti

#endif
