#ifndef DEFINETTI_TENSOR_HPP
#define DEFINETTI_TENSOR_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "config.hpp"
#include "geometry.hpp"

namespace definetti {

/// Catalog of size-n multisets over d symbols in colex order, the index set of
/// the symmetric-subspace basis. Basis element E_alpha is the sum over the
/// distinct arrangements of alpha (no normalization).
struct SymBasis {
  int d = 0;
  int n = 0;
  std::vector<std::vector<int>> multisets;  // count vectors, each sums to n

  int size() const { return static_cast<int>(multisets.size()); }
  int index_of(const std::vector<int>& counts) const;

 private:
  friend SymBasis sym_index(int, int, const Config&);
  std::map<std::vector<int>, int> lookup_;
};

SymBasis sym_index(int d, int n, const Config& cfg = Config());

/// Number of distinct arrangements of a count vector (multinomial).
double multiset_arrangements(const std::vector<int>& counts);

long long binomial(int n, int k);

/// Pairing of the symmetrized product functional g_1 x ... x g_n with every
/// basis monomial E_alpha at once: row[alpha] = (g_1 x...x g_n)(E_alpha).
/// The value depends only on the multiset of the g's.
Vec sym_pairing_row(const std::vector<Vec>& gs, const SymBasis& basis);

/// Single pairing, exact by recursive expansion.
double eval_sym_functional(const std::vector<Vec>& gs, const std::vector<int>& alpha_counts,
                           const SymBasis& basis);

/// Element of V_A tensor Sym^n(V_B) in the multiset basis: coefficient (i,
/// alpha) multiplies a_i x E_alpha. n = 0 degenerates to a plain V_A vector.
struct SymExtension {
  int d_A = 0;
  SymBasis basis;          // over d_B symbols, size n
  Mat coeffs;              // d_A x basis.size()

  int n() const { return basis.n; }
  int d_B() const { return basis.d; }
  Vec flat() const;        // row-major (i, alpha)
  static SymExtension from_flat(int d_A, const SymBasis& basis, const Vec& flat);

  /// Product extension x_A x (x_B)^n.
  static SymExtension product(const Vec& x_A, const Vec& x_B, int n, const Config& cfg = Config());
};

/// Applies the unit covector of B to n-keep symmetric factors.
SymExtension partial_unit(const SymExtension& y, int keep, const Vec& unit_B);

/// Image of id_A x L x id_{B^{n-1}} on the symmetric representation; the
/// output W index is the middle axis.
struct FirstFactorImage {
  int d_A = 0;
  int d_W = 0;
  SymBasis basis;  // size n-1
  std::vector<Mat> coeffs;  // per W row: d_A x basis.size()
};

FirstFactorImage apply_on_first_factor(const Mat& L, const SymExtension& y);

/// Single covector row on the first factor, staying in the SymExtension form.
SymExtension apply_effect_on_first_factor(const Vec& row, const SymExtension& y);

/// Homogenization of the affine map x -> M x + offset * unit(x): the unique
/// linear matrix agreeing with it on the unit slice.
Mat from_affine(const Mat& M, const Vec& offset, const StateSpace& K);

/// Maximal tensor product of two polytopal spaces. Facets are the pairwise
/// facet products; the vertex list requires an H-to-V conversion and is
/// computed on demand (and cached on disk when cfg.cache_dir is set).
class ProductSpace {
 public:
  ProductSpace(StateSpace A, StateSpace B, const Config& cfg);

  const StateSpace& A() const { return A_; }
  const StateSpace& B() const { return B_; }
  int dim() const { return A_.dim * B_.dim; }
  const std::vector<Vec>& facets() const { return facets_; }
  const Vec& unit() const { return unit_; }
  const std::vector<Vec>& sep_generators() const { return sep_generators_; }

  const std::vector<Vec>& max_vertices(const Config& cfg) const;

  /// The product space as a StateSpace over its own (max) vertex list.
  StateSpace as_state_space(const Config& cfg) const;

  /// Marginal on A (apply unit_B) and on B (apply unit_A).
  Vec marginal_A(const Vec& x) const;
  Vec marginal_B(const Vec& x) const;

 private:
  StateSpace A_, B_;
  std::vector<Vec> facets_;
  Vec unit_;
  std::vector<Vec> sep_generators_;
  mutable std::shared_ptr<std::vector<Vec>> max_vertices_;
};

Vec tensor_of(const Vec& a, const Vec& b);

/// Distance from x to the separable set in the dual base norm, as one LP.
double separable_distance(const ProductSpace& P, const Vec& x, const Config& cfg = Config());

std::string content_hash_hex(const std::string& data);

}  // namespace definetti

#endif
