#include "polyhedra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "errors.hpp"

namespace definetti {

namespace {

using Bits = std::vector<std::uint64_t>;

Bits bits_make(int n) { return Bits((n + 63) / 64, 0); }
void bits_set(Bits& b, int i) { b[i >> 6] |= (std::uint64_t(1) << (i & 63)); }

bool bits_subset(const Bits& a, const Bits& b) {
  for (size_t w = 0; w < a.size(); ++w)
    if (a[w] & ~b[w]) return false;
  return true;
}

Bits bits_and(const Bits& a, const Bits& b) {
  Bits r(a.size());
  for (size_t w = 0; w < a.size(); ++w) r[w] = a[w] & b[w];
  return r;
}

struct Ray {
  Vec dir;     // 2-norm normalized
  Bits tight;  // processed rows where the ray is tight
};

constexpr double kClassTol = 1e-9;

}  // namespace

std::vector<Vec> cone_extreme_rays(const Mat& A, const Config& cfg) {
  const int m = static_cast<int>(A.rows());
  const int d = static_cast<int>(A.cols());
  if (m < d) fail(ErrorKind::Degenerate, "cone description has fewer rows than dimensions");

  // Greedy selection of d independent rows for the initial simplicial cone.
  std::vector<int> init;
  {
    Mat basis(d, d);
    int have = 0;
    for (int r = 0; r < m && have < d; ++r) {
      basis.row(have) = A.row(r).normalized();
      Eigen::ColPivHouseholderQR<Mat> qr(basis.topRows(have + 1).transpose());
      qr.setThreshold(1e-10);
      if (qr.rank() == have + 1) {
        init.push_back(r);
        ++have;
      }
    }
    if (have < d) fail(ErrorKind::Degenerate, "cone rows do not span; lineality space present");
  }

  std::vector<int> order = init;
  {
    std::vector<bool> used(m, false);
    for (int r : init) used[r] = true;
    for (int r = 0; r < m; ++r)
      if (!used[r]) order.push_back(r);
  }

  Mat R(d, d);
  for (int k = 0; k < d; ++k) R.row(k) = A.row(init[k]);
  Mat Rinv = R.fullPivLu().inverse();
  if (!Rinv.allFinite()) fail(ErrorKind::Degenerate, "initial cone rows are numerically singular");

  std::vector<Ray> rays;
  rays.reserve(d);
  for (int k = 0; k < d; ++k) {
    Ray ray;
    ray.dir = Rinv.col(k).normalized();
    ray.tight = bits_make(m);
    for (int j = 0; j < d; ++j)
      if (j != k) bits_set(ray.tight, j);  // positions in processing order
    rays.push_back(std::move(ray));
  }

  for (int pos = d; pos < m; ++pos) {
    const Vec a = A.row(order[pos]);
    const double anorm = a.norm();
    std::vector<int> plus, zero, minus;
    std::vector<double> val(rays.size());
    for (size_t i = 0; i < rays.size(); ++i) {
      val[i] = a.dot(rays[i].dir);
      const double rel = val[i] / (anorm > 0 ? anorm : 1.0);
      if (rel > kClassTol) plus.push_back(static_cast<int>(i));
      else if (rel < -kClassTol) minus.push_back(static_cast<int>(i));
      else zero.push_back(static_cast<int>(i));
    }

    for (int i : zero) bits_set(rays[i].tight, pos);
    if (minus.empty()) continue;

    std::vector<Ray> next;
    next.reserve(plus.size() + zero.size());
    for (int i : plus) next.push_back(rays[i]);
    for (int i : zero) next.push_back(rays[i]);

    for (int p : plus) {
      for (int n : minus) {
        Bits common = bits_and(rays[p].tight, rays[n].tight);
        bool adjacent = true;
        for (size_t q = 0; q < rays.size(); ++q) {
          if (static_cast<int>(q) == p || static_cast<int>(q) == n) continue;
          if (bits_subset(common, rays[q].tight)) {
            adjacent = false;
            break;
          }
        }
        if (!adjacent) continue;
        Ray fresh;
        fresh.dir = (val[p] * rays[n].dir - val[n] * rays[p].dir).normalized();
        fresh.tight = common;
        bits_set(fresh.tight, pos);
        next.push_back(std::move(fresh));
      }
    }
    rays.swap(next);
    if (static_cast<long>(rays.size()) > cfg.cap_enum)
      fail(ErrorKind::EnumerationOverflow,
           "double description exceeded cap of " + std::to_string(cfg.cap_enum) + " rays");
  }

  // Deterministic order: lexicographic by coordinates.
  std::vector<Vec> out;
  out.reserve(rays.size());
  for (auto& r : rays) out.push_back(std::move(r.dir));
  std::sort(out.begin(), out.end(), [](const Vec& x, const Vec& y) {
    for (int i = 0; i < x.size(); ++i) {
      if (std::abs(x[i] - y[i]) > 1e-9) return x[i] < y[i];
    }
    return false;
  });
  return out;
}

Vec SlicedBody::embed_point(const Vec& reduced) const {
  Vec full = embed * reduced;
  const double t = full[ambient];
  if (std::abs(t) < 1e-14) fail(ErrorKind::Degenerate, "reduced point at infinity");
  return full.head(ambient) / t;
}

Vec SlicedBody::reduce_point(const Vec& y, double tol) const {
  if (y.size() != ambient) fail(ErrorKind::ShapeMismatch, "reduce_point: wrong ambient dimension");
  Vec h(ambient + 1);
  h.head(ambient) = y;
  h[ambient] = 1.0;
  Vec z = embed.transpose() * h;  // orthonormal columns
  const double resid = (embed * z - h).norm();
  if (resid > tol * (1.0 + h.norm()))
    fail(ErrorKind::ShapeMismatch,
         "point is off the constraint slice (residual " + std::to_string(resid) + ")");
  return z;
}

SlicedBody make_sliced_body(int ambient, const Mat& ineqs, const Mat& eq_A, const Vec& eq_b,
                            const Config& cfg, const std::string& what) {
  if (eq_A.rows() != eq_b.size() || (eq_A.rows() > 0 && eq_A.cols() != ambient) ||
      (ineqs.rows() > 0 && ineqs.cols() != ambient))
    fail(ErrorKind::ShapeMismatch, what + ": inconsistent slice description");

  // Homogeneous equalities [eq_A | -eq_b](t*y, t) = 0; orthonormal kernel.
  Mat Q;
  if (eq_A.rows() == 0) {
    Q = Mat::Identity(ambient + 1, ambient + 1);
  } else {
    Mat E(eq_A.rows(), ambient + 1);
    E.leftCols(ambient) = eq_A;
    E.col(ambient) = -eq_b;
    Eigen::JacobiSVD<Mat> svd(E, Eigen::ComputeFullV);
    int rank = 0;
    const double thresh = std::max(1e-12, svd.singularValues()[0] * 1e-12);
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > thresh) ++rank;
    const int dof = ambient + 1 - rank;
    if (dof <= 0) fail(ErrorKind::Degenerate, what + ": equality block leaves no degrees of freedom");
    Q = svd.matrixV().rightCols(dof);
  }
  const int d = static_cast<int>(Q.cols());

  SlicedBody body;
  body.ambient = ambient;
  body.embed = Q;
  body.unit = Q.row(ambient);

  std::vector<Vec> rows;
  for (int r = 0; r < ineqs.rows(); ++r) {
    Vec h(ambient + 1);
    h.head(ambient) = ineqs.row(r);
    h[ambient] = 0.0;
    Vec red = Q.transpose() * h;
    if (red.norm() > 1e-12) rows.push_back(red);
  }
  rows.push_back(body.unit);  // t >= 0

  Mat F(rows.size(), d);
  for (size_t r = 0; r < rows.size(); ++r) F.row(r) = rows[r];
  body.facets = F;

  std::vector<Vec> rays = cone_extreme_rays(F, cfg);
  body.vertices.reserve(rays.size());
  for (const Vec& r : rays) {
    const double u = body.unit.dot(r);
    if (u < cfg.interior_tol)
      fail(ErrorKind::Degenerate, what + ": slice is unbounded (recession ray found)");
    body.vertices.push_back(r / u);
  }
  if (body.vertices.empty()) fail(ErrorKind::Degenerate, what + ": slice is empty");

  // Keep one copy of each supporting facet: drop duplicate directions and
  // rows whose tight vertex set spans less than a facet.
  {
    std::vector<Vec> kept;
    for (int r = 0; r < body.facets.rows(); ++r) {
      Vec f = body.facets.row(r).normalized();
      bool dup = false;
      for (const Vec& g : kept)
        if ((f - g).norm() < 1e-9) { dup = true; break; }
      if (dup) continue;
      Mat tight(body.vertices.size(), d);
      int nt = 0;
      for (const Vec& v : body.vertices)
        if (std::abs(f.dot(v)) <= 1e-9 * (1.0 + v.norm())) tight.row(nt++) = v;
      if (nt < d - 1) continue;
      Eigen::ColPivHouseholderQR<Mat> qr(Mat(tight.topRows(nt)));
      qr.setThreshold(1e-9);
      if (qr.rank() >= d - 1) kept.push_back(f);
    }
    if (!kept.empty()) {
      Mat pruned(kept.size(), d);
      for (size_t r = 0; r < kept.size(); ++r) pruned.row(r) = kept[r];
      body.facets = pruned;
    }
  }
  return body;
}

double circumradius_symmetric(const std::vector<Vec>& verts) {
  double r = 0.0;
  for (const Vec& v : verts) r = std::max(r, v.norm());
  return r;
}

double inradius_symmetric_lower_lp(const std::vector<Vec>& verts, const Config& cfg) {
  if (verts.empty()) fail(ErrorKind::Degenerate, "inradius of empty vertex set");
  const int d = static_cast<int>(verts[0].size());
  const int nv = static_cast<int>(verts.size());
  // Largest r with r e_k in conv(V u -V): max r s.t. r e_k = V(a - b),
  // sum(a + b) <= 1 (slack s >= 0 absorbs the inequality).
  double r_cross = kInf;
  for (int k = 0; k < d; ++k) {
    LinearProgram lp;
    lp.name = "inradius-coordinate";
    lp.sense = LinearProgram::Sense::Max;
    const int nvar = 2 * nv + 2;  // a, b, r, slack
    lp.objective = Vec::Zero(nvar);
    lp.objective[2 * nv] = 1.0;
    lp.eq_A = Mat::Zero(d + 1, nvar);
    lp.eq_b = Vec::Zero(d + 1);
    for (int i = 0; i < nv; ++i) {
      lp.eq_A.col(i).head(d) = verts[i];
      lp.eq_A.col(nv + i).head(d) = -verts[i];
      lp.eq_A(d, i) = 1.0;
      lp.eq_A(d, nv + i) = 1.0;
    }
    lp.eq_A(k, 2 * nv) = -1.0;
    lp.eq_A(d, 2 * nv + 1) = 1.0;
    lp.eq_b[d] = 1.0;
    lp.lb = Vec::Zero(nvar);
    Solution s = solve_optimal(lp, cfg);
    r_cross = std::min(r_cross, s.objective);
  }
  if (r_cross <= 0.0) fail(ErrorKind::Degenerate, "symmetric hull is not full-dimensional");
  return r_cross / std::sqrt(static_cast<double>(d));
}

double inradius_symmetric_exact(const std::vector<Vec>& verts, const Config& cfg) {
  if (verts.empty()) fail(ErrorKind::Degenerate, "inradius of empty vertex set");
  const int d = static_cast<int>(verts[0].size());
  // Polar {h : |h.v| <= 1} as the cone {(h,c) : c - h.v >= 0, c + h.v >= 0};
  // polar vertices give the facet distances of conv(V u -V).
  Mat A(2 * verts.size(), d + 1);
  for (size_t i = 0; i < verts.size(); ++i) {
    A.row(2 * i).head(d) = -verts[i].transpose();
    A(2 * i, d) = 1.0;
    A.row(2 * i + 1).head(d) = verts[i].transpose();
    A(2 * i + 1, d) = 1.0;
  }
  std::vector<Vec> rays = cone_extreme_rays(A, cfg);
  double circ = 0.0;
  for (const Vec& r : rays) {
    const double c = r[d];
    if (c < 1e-12) fail(ErrorKind::Degenerate, "symmetric hull is not full-dimensional");
    circ = std::max(circ, r.head(d).norm() / c);
  }
  if (circ <= 0.0) fail(ErrorKind::Degenerate, "degenerate polar");
  return 1.0 / circ;
}

}  // namespace definetti
