#include <cmath>

#include "definetti/errors.hpp"
#include "definetti/polyhedra.hpp"
#include "doctest.h"

using namespace definetti;

TEST_CASE("extreme rays of the nonnegative orthant") {
  Config cfg;
  Mat A = Mat::Identity(4, 4);
  auto rays = cone_extreme_rays(A, cfg);
  REQUIRE(rays.size() == 4);
  for (const Vec& r : rays) {
    CHECK(r.maxCoeff() == doctest::Approx(1.0));
    CHECK(r.minCoeff() >= -1e-12);
  }
}

TEST_CASE("extreme rays of the cone over the square") {
  Config cfg;
  Mat A(4, 3);
  A << 0.5, 0.5, 0.0,
       0.5, -0.5, 0.0,
       0.5, 0.0, 0.5,
       0.5, 0.0, -0.5;
  auto rays = cone_extreme_rays(A, cfg);
  REQUIRE(rays.size() == 4);
  for (const Vec& r : rays) {
    Vec n = r / r[0];
    CHECK(std::abs(std::abs(n[1]) - 1.0) < 1e-9);
    CHECK(std::abs(std::abs(n[2]) - 1.0) < 1e-9);
  }
}

TEST_CASE("lineality is rejected") {
  Config cfg;
  Mat A(2, 3);
  A << 1.0, 0.0, 0.0,
       0.0, 1.0, 0.0;
  CHECK_THROWS_AS(cone_extreme_rays(A, cfg), Error);
}

TEST_CASE("sliced body reproduces the simplex") {
  Config cfg;
  // {y in R^3 : y >= 0, sum y = 1}
  Mat ineqs = Mat::Identity(3, 3);
  Mat eq(1, 3);
  eq << 1.0, 1.0, 1.0;
  Vec rhs = Vec::Ones(1);
  SlicedBody body = make_sliced_body(3, ineqs, eq, rhs, cfg, "simplex-slice");
  CHECK(body.dim() == 3);
  REQUIRE(body.vertices.size() == 3);
  for (const Vec& v : body.vertices) {
    Vec y = body.embed_point(v);
    CHECK(y.minCoeff() >= -1e-10);
    CHECK(y.sum() == doctest::Approx(1.0));
    CHECK(y.maxCoeff() == doctest::Approx(1.0));
    Vec z = body.reduce_point(y);
    CHECK((body.embed_point(z) - y).norm() < 1e-10);
  }
}

TEST_CASE("unbounded slice is reported") {
  Config cfg;
  Mat ineqs = Mat::Identity(2, 2);
  Mat eq(0, 2);
  Vec rhs(0);
  CHECK_THROWS_AS(make_sliced_body(2, ineqs, eq, rhs, cfg, "orthant"), Error);
}

TEST_CASE("radii of symmetric hulls") {
  // Cross-polytope in R^4: inradius 1/2, circumradius 1.
  Config cfg;
  std::vector<Vec> verts;
  for (int i = 0; i < 4; ++i) {
    Vec e = Vec::Zero(4);
    e[i] = 1.0;
    verts.push_back(e);
  }
  CHECK(circumradius_symmetric(verts) == doctest::Approx(1.0));
  CHECK(inradius_symmetric_exact(verts, cfg) == doctest::Approx(0.5));

  // Square vertices (1,+-1,+-1): conv(+-V) is the cube, inradius 1.
  std::vector<Vec> cube;
  for (double s : {1.0, -1.0})
    for (double t : {1.0, -1.0}) {
      Vec v(3);
      v << 1.0, s, t;
      cube.push_back(v);
    }
  CHECK(inradius_symmetric_exact(cube, cfg) == doctest::Approx(1.0));
}
