#include <cmath>

#include "definetti/errors.hpp"
#include "definetti/hierarchy.hpp"
#include "doctest.h"
#include "support/hierarchy_oracles.hpp"
#include "support/instances.hpp"

using namespace definetti;

TEST_CASE("level 1 on nuclear pairs equals the product optimum") {
  Config cfg;
  Rng rng(301);
  for (int trial = 0; trial < 6; ++trial) {
    LocalProblem p = instances::unconstrained_problem(simplex_space(2), simplex_space(3), rng,
                                                      "nuclear-" + std::to_string(trial));
    OuterReport rep = solve_level(p, 1, cfg);
    auto oracle = hierarchy_oracle::product_optimum(p, cfg);
    REQUIRE(oracle.has_value());
    CHECK(rep.value == doctest::Approx(*oracle).epsilon(1e-7));
  }
}

TEST_CASE("level 1 constraint counts follow the closed form") {
  Config cfg;
  LocalProblem p = instances::box_correlation_problem();
  for (int n = 1; n <= 3; ++n) {
    LinearProgram lp = build_level(p, n, cfg);
    const long facet_sets = binomial(4 + n - 1, n);
    CHECK(lp.ge_A.rows() == 4 * facet_sets);
    CHECK(lp.eq_A.rows() == 1);
    CHECK(lp.objective.size() == 3 * binomial(3 + n - 1, n));
  }
}

TEST_CASE("product objective is level independent") {
  Config cfg;
  Rng rng(302);
  LocalProblem p = instances::unconstrained_problem(simplex_space(2), simplex_space(2), rng,
                                                    "product-objective");
  // Rank-one objective f x g.
  Vec f(2), g(2);
  f << 0.7, -0.2;
  g << 0.1, 0.9;
  p.P = tensor_of(f, g);
  auto oracle = hierarchy_oracle::product_optimum(p, cfg);
  for (int n = 1; n <= 3; ++n) {
    OuterReport rep = solve_level(p, n, cfg);
    CHECK(rep.value == doctest::Approx(*oracle).epsilon(1e-7));
  }
}

TEST_CASE("box-correlation objective tightens with the level") {
  Config cfg;
  LocalProblem p = instances::box_correlation_problem();

  OuterReport r1 = solve_level(p, 1, cfg);
  CHECK(r1.value == doctest::Approx(-4.0).epsilon(1e-7));  // box vertex

  std::vector<OuterReport> reports = run_schedule(p, 4, cfg);
  for (size_t i = 1; i < reports.size(); ++i)
    CHECK(reports[i].value >= reports[i - 1].value - 1e-7);
  CHECK(reports[1].value > -4.0 + 0.1);  // the box is not 2-extendible

  const double sep = *hierarchy_oracle::product_optimum(p, cfg);
  CHECK(sep == doctest::Approx(-2.0));
  for (const auto& rep : reports) {
    CHECK(rep.value <= sep + 1e-7);
    CHECK(sep - rep.value <= rep.error_bound + 1e-6);
    CHECK(rep.error_bound > 0.0);
  }

  // Analytic bar scales as 1/sqrt(n).
  CHECK(reports[3].error_bound == doctest::Approx(0.5 * reports[0].error_bound).epsilon(1e-9));
}

TEST_CASE("average constraint holds at the optimizer marginal") {
  Config cfg;
  Rng rng(303);
  LocalProblem p = instances::unconstrained_problem(square_space(), square_space(), rng,
                                                    "avg-constraint");
  instances::add_local_constraints(p, rng);
  OuterReport rep = solve_level(p, 2, cfg);
  // (F_A x id)(x_AB) = 0 within tolerance.
  for (int r = 0; r < p.F_A.rows(); ++r)
    for (int k = 0; k < p.B.dim; ++k) {
      double acc = 0.0;
      for (int i = 0; i < p.A.dim; ++i) acc += p.F_A(r, i) * rep.x_AB[i * p.B.dim + k];
      CHECK(std::abs(acc) <= 1e-7);
    }
}

TEST_CASE("symmetric basis agrees with the ordered-tensor relaxation") {
  Config cfg;
  Rng rng(304);
  int checked = 0;
  for (int trial = 0; trial < 8; ++trial) {
    StateSpace A = (trial % 2 == 0) ? simplex_space(2) : square_space();
    StateSpace B = (trial % 3 == 0) ? simplex_space(3) : square_space();
    LocalProblem p = instances::unconstrained_problem(A, B, rng, "fidelity-" + std::to_string(trial));
    if (trial >= 4) instances::add_local_constraints(p, rng);
    for (int n : {2, 3}) {
      const double sym = solve_level(p, n, cfg).value;
      const double ord = hierarchy_oracle::ordered_level_value(p, n, cfg);
      CHECK(sym == doctest::Approx(ord).epsilon(1e-7));
      ++checked;
    }
  }
  CHECK(checked == 16);
}

TEST_CASE("infeasible equality block is certified") {
  Config cfg;
  LocalProblem p = instances::box_correlation_problem();
  p.F_A = Mat(1, 3);
  p.F_A.row(0) = p.A.unit;  // forces unit(x_A) = 0, impossible for states
  try {
    solve_level(p, 1, cfg);
    FAIL("expected InfeasibleRelaxation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InfeasibleRelaxation);
  }
}

TEST_CASE("identity lift leaves level values unchanged") {
  Config cfg;
  Rng rng(305);
  LocalProblem p = instances::unconstrained_problem(square_space(), simplex_space(3), rng,
                                                    "identity-lift");
  LocalProblem lifted = lift_program(p, identity_lift(p.A), identity_lift(p.B), cfg);
  CHECK(solve_level(lifted, 1, cfg).value ==
        doctest::Approx(solve_level(p, 1, cfg).value).epsilon(1e-7));
}

TEST_CASE("simplex-projection lift of the square preserves level 1") {
  Config cfg;
  Rng rng(306);

  // Square as the projection of the 4-vertex simplex cone: T e_k = v_k.
  StateSpace sq = square_space();
  LiftData simplex_lift;
  simplex_lift.cone_facets = Mat::Identity(4, 4);
  simplex_lift.T = Mat(3, 4);
  for (int k = 0; k < 4; ++k) simplex_lift.T.col(k) = sq.vertices[k];
  simplex_lift.R = Mat::Ones(1, 4);
  simplex_lift.r = Vec::Ones(1);

  for (int trial = 0; trial < 3; ++trial) {
    LocalProblem p = instances::unconstrained_problem(sq, simplex_space(3), rng,
                                                      "projection-lift-" + std::to_string(trial));
    LocalProblem lifted = lift_program(p, simplex_lift, identity_lift(p.B), cfg);
    CHECK(solve_level(lifted, 1, cfg).value ==
          doctest::Approx(solve_level(p, 1, cfg).value).epsilon(1e-7));
  }

  // A wrong slice value is caught by the image check.
  LiftData broken = simplex_lift;
  broken.r = Vec::Constant(1, 2.0);
  LocalProblem p = instances::unconstrained_problem(sq, simplex_space(3), rng, "broken-lift");
  try {
    lift_program(p, broken, identity_lift(p.B), cfg);
    FAIL("expected LiftInconsistent");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LiftInconsistent);
  }
}

TEST_CASE("level cap is enforced") {
  Config cfg;
  cfg.cap_level = 2;
  LocalProblem p = instances::box_correlation_problem();
  CHECK_THROWS_AS(build_level(p, 3, cfg), Error);
}
