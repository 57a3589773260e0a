#include "tensor.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "errors.hpp"
#include "json.hpp"
#include "polyhedra.hpp"

namespace definetti {

using nlohmann::json;

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r < 0 || r > (1LL << 62)) fail(ErrorKind::DimensionOverflow, "binomial overflow");
  }
  return r;
}

int SymBasis::index_of(const std::vector<int>& counts) const {
  auto it = lookup_.find(counts);
  if (it == lookup_.end()) fail(ErrorKind::ShapeMismatch, "multiset not in basis");
  return it->second;
}

SymBasis sym_index(int d, int n, const Config& cfg) {
  if (d < 1 || n < 0) fail(ErrorKind::ShapeMismatch, "sym_index: bad arguments");
  const long long size = binomial(d + n - 1, n);
  if (size > cfg.cap_enum)
    fail(ErrorKind::DimensionOverflow, "symmetric basis of size " + std::to_string(size) +
                                           " exceeds cap " + std::to_string(cfg.cap_enum));
  SymBasis basis;
  basis.d = d;
  basis.n = n;
  std::vector<int> cur(d, 0);
  // Colex enumeration: recursively distribute n among the d symbols.
  auto rec = [&](auto&& self, int sym, int left) -> void {
    if (sym == d - 1) {
      cur[sym] = left;
      basis.lookup_[cur] = basis.size();
      basis.multisets.push_back(cur);
      return;
    }
    for (int c = left; c >= 0; --c) {
      cur[sym] = c;
      self(self, sym + 1, left - c);
    }
  };
  rec(rec, 0, n);
  return basis;
}

double multiset_arrangements(const std::vector<int>& counts) {
  int n = 0;
  for (int c : counts) n += c;
  double r = 1.0;
  int used = 0;
  for (int c : counts) {
    for (int i = 1; i <= c; ++i) {
      ++used;
      r *= static_cast<double>(used) / i;
    }
  }
  (void)n;
  return r;
}

Vec sym_pairing_row(const std::vector<Vec>& gs, const SymBasis& basis) {
  const int n = basis.n;
  const int d = basis.d;
  if (static_cast<int>(gs.size()) != n)
    fail(ErrorKind::ShapeMismatch, "sym_pairing_row: covector count differs from basis degree");
  for (const Vec& g : gs)
    if (g.size() != d) fail(ErrorKind::ShapeMismatch, "sym_pairing_row: covector dimension");

  // P_t(beta) = (g_{t+1} x ... x g_n)(E_beta), built from t = n down to 0
  // through E_beta = sum_k e_k x E_{beta - e_k}.
  Config wide;
  wide.cap_enum = std::numeric_limits<long>::max() / 2;
  std::vector<SymBasis> levels;
  for (int s = 0; s <= n; ++s) levels.push_back(sym_index(d, s, wide));

  std::vector<double> prev(1, 1.0);  // size-0 level
  for (int t = n - 1; t >= 0; --t) {
    const SymBasis& lvl = levels[n - t];
    const SymBasis& sub = levels[n - t - 1];
    std::vector<double> cur(lvl.size(), 0.0);
    for (int b = 0; b < lvl.size(); ++b) {
      std::vector<int> beta = lvl.multisets[b];
      double acc = 0.0;
      for (int k = 0; k < d; ++k) {
        if (beta[k] == 0) continue;
        --beta[k];
        acc += gs[t][k] * prev[sub.index_of(beta)];
        ++beta[k];
      }
      cur[b] = acc;
    }
    prev.swap(cur);
  }

  Vec row(basis.size());
  for (int a = 0; a < basis.size(); ++a) row[a] = prev[a];
  return row;
}

double eval_sym_functional(const std::vector<Vec>& gs, const std::vector<int>& alpha_counts,
                           const SymBasis& basis) {
  Vec row = sym_pairing_row(gs, basis);
  return row[basis.index_of(alpha_counts)];
}

Vec SymExtension::flat() const {
  Vec v(d_A * basis.size());
  for (int i = 0; i < d_A; ++i)
    for (int a = 0; a < basis.size(); ++a) v[i * basis.size() + a] = coeffs(i, a);
  return v;
}

SymExtension SymExtension::from_flat(int d_A, const SymBasis& basis, const Vec& flat) {
  if (flat.size() != d_A * basis.size())
    fail(ErrorKind::ShapeMismatch, "SymExtension::from_flat: size mismatch");
  SymExtension y;
  y.d_A = d_A;
  y.basis = basis;
  y.coeffs = Mat(d_A, basis.size());
  for (int i = 0; i < d_A; ++i)
    for (int a = 0; a < basis.size(); ++a) y.coeffs(i, a) = flat[i * basis.size() + a];
  return y;
}

SymExtension SymExtension::product(const Vec& x_A, const Vec& x_B, int n, const Config& cfg) {
  SymExtension y;
  y.d_A = static_cast<int>(x_A.size());
  y.basis = sym_index(static_cast<int>(x_B.size()), n, cfg);
  y.coeffs = Mat(y.d_A, y.basis.size());
  for (int a = 0; a < y.basis.size(); ++a) {
    double w = 1.0;
    const auto& counts = y.basis.multisets[a];
    for (size_t k = 0; k < counts.size(); ++k)
      for (int c = 0; c < counts[k]; ++c) w *= x_B[k];
    for (int i = 0; i < y.d_A; ++i) y.coeffs(i, a) = x_A[i] * w;
  }
  return y;
}

SymExtension partial_unit(const SymExtension& y, int keep, const Vec& unit_B) {
  const int n = y.n();
  const int d = y.d_B();
  if (keep < 0 || keep > n) fail(ErrorKind::ShapeMismatch, "partial_unit: keep out of range");
  if (unit_B.size() != d) fail(ErrorKind::ShapeMismatch, "partial_unit: unit dimension");
  if (keep == n) return y;

  Config wide;
  wide.cap_enum = std::numeric_limits<long>::max() / 2;
  SymBasis target = sym_index(d, keep, wide);
  SymBasis dropped = sym_index(d, n - keep, wide);

  // Weight of contracting E_delta fully with the unit covector.
  std::vector<double> unit_weight(dropped.size());
  for (int a = 0; a < dropped.size(); ++a) {
    const auto& delta = dropped.multisets[a];
    double w = multiset_arrangements(delta);
    for (int k = 0; k < d; ++k)
      for (int c = 0; c < delta[k]; ++c) w *= unit_B[k];
    unit_weight[a] = w;
  }

  SymExtension z;
  z.d_A = y.d_A;
  z.basis = target;
  z.coeffs = Mat::Zero(y.d_A, target.size());
  std::vector<int> sum(d);
  for (int b = 0; b < target.size(); ++b) {
    const auto& beta = target.multisets[b];
    for (int a = 0; a < dropped.size(); ++a) {
      const auto& delta = dropped.multisets[a];
      for (int k = 0; k < d; ++k) sum[k] = beta[k] + delta[k];
      const int src = y.basis.index_of(sum);
      if (unit_weight[a] == 0.0) continue;
      for (int i = 0; i < y.d_A; ++i) z.coeffs(i, b) += unit_weight[a] * y.coeffs(i, src);
    }
  }
  return z;
}

FirstFactorImage apply_on_first_factor(const Mat& L, const SymExtension& y) {
  const int n = y.n();
  const int d = y.d_B();
  if (n < 1) fail(ErrorKind::ShapeMismatch, "apply_on_first_factor: no factor to act on");
  if (L.cols() != d) fail(ErrorKind::ShapeMismatch, "apply_on_first_factor: map dimension");

  Config wide;
  wide.cap_enum = std::numeric_limits<long>::max() / 2;
  FirstFactorImage out;
  out.d_A = y.d_A;
  out.d_W = static_cast<int>(L.rows());
  out.basis = sym_index(d, n - 1, wide);
  out.coeffs.assign(out.d_W, Mat::Zero(y.d_A, out.basis.size()));

  std::vector<int> alpha(d);
  for (int b = 0; b < out.basis.size(); ++b) {
    const auto& beta = out.basis.multisets[b];
    for (int k = 0; k < d; ++k) {
      alpha = beta;
      ++alpha[k];
      const int src = y.basis.index_of(alpha);
      for (int w = 0; w < out.d_W; ++w) {
        if (L(w, k) == 0.0) continue;
        for (int i = 0; i < y.d_A; ++i) out.coeffs[w](i, b) += L(w, k) * y.coeffs(i, src);
      }
    }
  }
  return out;
}

SymExtension apply_effect_on_first_factor(const Vec& row, const SymExtension& y) {
  Mat L(1, row.size());
  L.row(0) = row;
  FirstFactorImage img = apply_on_first_factor(L, y);
  SymExtension z;
  z.d_A = y.d_A;
  z.basis = img.basis;
  z.coeffs = img.coeffs[0];
  return z;
}

Mat from_affine(const Mat& M, const Vec& offset, const StateSpace& K) {
  if (M.cols() != K.dim || offset.size() != M.rows())
    fail(ErrorKind::ShapeMismatch, "from_affine: map shapes");
  return M + offset * K.unit.transpose();
}

Vec tensor_of(const Vec& a, const Vec& b) {
  Vec t(a.size() * b.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) t[i * b.size() + j] = a[i] * b[j];
  return t;
}

ProductSpace::ProductSpace(StateSpace A, StateSpace B, const Config& cfg)
    : A_(std::move(A)), B_(std::move(B)) {
  require_valid(A_, cfg);
  require_valid(B_, cfg);
  if (static_cast<long>(A_.dim) * B_.dim > cfg.cap_dim)
    fail(ErrorKind::DimensionOverflow,
         "product dimension " + std::to_string(A_.dim * B_.dim) + " exceeds cap " +
             std::to_string(cfg.cap_dim));
  unit_ = tensor_of(A_.unit, B_.unit);
  for (const Vec& f : A_.facets)
    for (const Vec& g : B_.facets) facets_.push_back(tensor_of(f, g));
  for (const Vec& a : A_.vertices)
    for (const Vec& b : B_.vertices) sep_generators_.push_back(tensor_of(a, b));
}

namespace {

json space_json_min(const StateSpace& K) {
  json j;
  j["dim"] = K.dim;
  json vs = json::array(), fs = json::array(), u = json::array();
  for (const Vec& v : K.vertices) {
    json row = json::array();
    for (int i = 0; i < v.size(); ++i) row.push_back(v[i]);
    vs.push_back(row);
  }
  for (const Vec& f : K.facets) {
    json row = json::array();
    for (int i = 0; i < f.size(); ++i) row.push_back(f[i]);
    fs.push_back(row);
  }
  for (int i = 0; i < K.unit.size(); ++i) u.push_back(K.unit[i]);
  j["vertices"] = vs;
  j["facets"] = fs;
  j["unit"] = u;
  return j;
}

}  // namespace

std::string content_hash_hex(const std::string& data) {
  // FNV-1a 64.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

const std::vector<Vec>& ProductSpace::max_vertices(const Config& cfg) const {
  if (max_vertices_) return *max_vertices_;

  std::string cache_path;
  if (!cfg.cache_dir.empty()) {
    json key;
    key["kind"] = "max-tensor-vertices-v1";
    key["A"] = space_json_min(A_);
    key["B"] = space_json_min(B_);
    cache_path = cfg.cache_dir + "/vertices-" + content_hash_hex(key.dump()) + ".json";
    std::ifstream in(cache_path);
    if (in) {
      json j = json::parse(in, nullptr, false);
      if (!j.is_discarded() && j.is_array() && !j.empty()) {
        auto verts = std::make_shared<std::vector<Vec>>();
        for (const auto& row : j) {
          Vec v(row.size());
          for (size_t i = 0; i < row.size(); ++i) v[i] = row[i].get<double>();
          verts->push_back(v);
        }
        max_vertices_ = verts;
        return *max_vertices_;
      }
    }
  }

  Mat F(facets_.size(), dim());
  for (size_t i = 0; i < facets_.size(); ++i) F.row(i) = facets_[i];
  std::vector<Vec> rays = cone_extreme_rays(F, cfg);
  auto verts = std::make_shared<std::vector<Vec>>();
  verts->reserve(rays.size());
  for (const Vec& r : rays) {
    const double u = unit_.dot(r);
    if (u < cfg.interior_tol)
      fail(ErrorKind::Degenerate, "max tensor cone has a ray with zero unit value");
    verts->push_back(r / u);
  }
  max_vertices_ = verts;

  if (!cache_path.empty()) {
    std::filesystem::create_directories(cfg.cache_dir);
    json j = json::array();
    for (const Vec& v : *max_vertices_) {
      json row = json::array();
      for (int i = 0; i < v.size(); ++i) row.push_back(v[i]);
      j.push_back(row);
    }
    std::ofstream out(cache_path);
    out << j.dump();
  }
  return *max_vertices_;
}

StateSpace ProductSpace::as_state_space(const Config& cfg) const {
  StateSpace K;
  K.dim = dim();
  K.label = A_.label + "(x)" + B_.label;
  K.unit = unit_;
  K.facets = facets_;
  K.vertices = max_vertices(cfg);
  return K;
}

Vec ProductSpace::marginal_A(const Vec& x) const {
  const int dA = A_.dim, dB = B_.dim;
  Vec m = Vec::Zero(dA);
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dB; ++j) m[i] += B_.unit[j] * x[i * dB + j];
  return m;
}

Vec ProductSpace::marginal_B(const Vec& x) const {
  const int dA = A_.dim, dB = B_.dim;
  Vec m = Vec::Zero(dB);
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dB; ++j) m[j] += A_.unit[i] * x[i * dB + j];
  return m;
}

double separable_distance(const ProductSpace& P, const Vec& x, const Config& cfg) {
  if (x.size() != P.dim()) fail(ErrorKind::ShapeMismatch, "separable_distance: dimension");
  const auto& maxv = P.max_vertices(cfg);
  const auto& gens = P.sep_generators();
  const int nv = static_cast<int>(maxv.size());
  const int ng = static_cast<int>(gens.size());
  const int D = P.dim();

  // min sum(alpha) + sum(beta) s.t. V a - V b + G c = x, 1.c = 1, all >= 0.
  LinearProgram lp;
  lp.name = "separable-distance";
  const int nvar = 2 * nv + ng;
  lp.objective = Vec::Zero(nvar);
  lp.objective.head(2 * nv).setOnes();
  lp.eq_A = Mat::Zero(D + 1, nvar);
  lp.eq_b = Vec::Zero(D + 1);
  for (int i = 0; i < nv; ++i) {
    lp.eq_A.col(i).head(D) = maxv[i];
    lp.eq_A.col(nv + i).head(D) = -maxv[i];
  }
  for (int i = 0; i < ng; ++i) {
    lp.eq_A.col(2 * nv + i).head(D) = gens[i];
    lp.eq_A(D, 2 * nv + i) = 1.0;
  }
  lp.eq_b.head(D) = x;
  lp.eq_b[D] = 1.0;
  lp.lb = Vec::Zero(nvar);
  Solution s = solve_optimal(lp, cfg);
  return s.objective;
}

}  // namespace definetti
