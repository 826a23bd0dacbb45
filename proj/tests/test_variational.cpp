#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "lpmk/sphere_geometry.hpp"
#include "lpmk/support_function.hpp"
#include "lpmk/variational.hpp"

namespace {
constexpr double kPi = std::numbers::pi;

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}
}  // namespace

TEST_CASE("normalization rescales constants back to one") {
  for (int n : {1, 2}) {
    const lpmk::SphereGrid grid(n, 32);
    for (double p : {-3.0, -8.0}) {
      const lpmk::SupportFunction two = lpmk::SupportFunction::constant(n, 2.0);
      const lpmk::SupportFunction u = lpmk::normalize(two, p, grid);
      CHECK(u.value(grid.node(0)) == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("unit-area ellipses are already normalized at p = -2") {
  const lpmk::SphereGrid grid(1, 128);
  const lpmk::SupportFunction e = lpmk::SupportFunction::ellipse(1.3, 1.0 / 1.3);
  const lpmk::SupportFunction u = lpmk::normalize(e, -2.0, grid);
  for (std::size_t i = 0; i < grid.size(); i += 17) {
    CHECK(u.value(grid.node(i)) == doctest::Approx(e.value(grid.node(i))).epsilon(1e-11));
  }
}

TEST_CASE("objective reproduces closed-form volumes") {
  const lpmk::SphereGrid g1(1, 128);
  CHECK(lpmk::objective(lpmk::SupportFunction::constant(1, 1.0), g1) ==
        doctest::Approx(-2.0 * kPi).epsilon(1e-13));
  CHECK(lpmk::objective(lpmk::SupportFunction::ellipse(1.3, 1.0 / 1.3), g1) ==
        doctest::Approx(-2.0 * kPi).epsilon(1e-12));
  const lpmk::SphereGrid g2(2, 32);
  CHECK(lpmk::objective(lpmk::SupportFunction::constant(2, 1.0), g2) ==
        doctest::Approx(-4.0 * kPi).epsilon(1e-13));
}

TEST_CASE("second variation formula has the predicted zero crossing") {
  // For xi = cos(3 theta) on S^1 the form equals 2 pi (7 + p): negative
  // exactly below the threshold p = -7.
  const lpmk::SphereGrid grid(1, 256);
  std::vector<double> c(7, 0.0);
  c[5] = 1.0;  // a_3
  const lpmk::SupportFunction xi = lpmk::SupportFunction::fourier(c);
  for (double p : {-6.5, -7.0, -7.5, -8.0}) {
    CHECK(lpmk::second_variation_formula(xi, p, grid) ==
          doctest::Approx(2.0 * kPi * (7.0 + p)).epsilon(1e-11));
  }
}

TEST_CASE("second variation is invariant under constant shifts of the direction") {
  const lpmk::SphereGrid grid(1, 128);
  const lpmk::SupportFunction xi = lpmk::SupportFunction::fourier({0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0});
  const lpmk::SupportFunction shifted =
      lpmk::SupportFunction::fourier({0.4, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0});
  const double a = lpmk::second_variation_formula(xi, -8.0, grid);
  const double b = lpmk::second_variation_formula(shifted, -8.0, grid);
  CHECK(a == doctest::Approx(b).epsilon(1e-11));
}

TEST_CASE("finite differences confirm the second variation on both spheres") {
  {
    const lpmk::SphereGrid grid(1, 256);
    std::vector<double> c(7, 0.0);
    c[5] = 0.5;
    const lpmk::SupportFunction xi = lpmk::SupportFunction::fourier(c);
    const double formula = lpmk::second_variation_formula(xi, -8.0, grid);
    const double fd = lpmk::second_variation_fd(xi, -8.0, grid);
    CHECK(fd == doctest::Approx(formula).epsilon(1e-3));
  }
  {
    const lpmk::VariationalProblem prob(2, -10.0, 3, 48);
    std::vector<double> unit(prob.basis_size(), 0.0);
    unit[1] = 0.4;
    const lpmk::SupportFunction xi = prob.to_support(unit);
    const double formula = lpmk::second_variation_formula(xi, -10.0, prob.grid());
    const double fd = lpmk::second_variation_fd(xi, -10.0, prob.grid());
    CHECK(fd == doctest::Approx(formula).epsilon(1e-3));
    // The closed form for a pure degree-3 eigenmode: -3 * int xi^2.
    const double xi_sq = 0.4 * 0.4;  // orthonormal coefficient squared
    CHECK(formula == doctest::Approx(-3.0 * xi_sq).epsilon(1e-9));
  }
}

TEST_CASE("finite-difference step validation") {
  const lpmk::SphereGrid grid(1, 64);
  const lpmk::SupportFunction xi = lpmk::SupportFunction::fourier({0.0, 0.0, 0.1});
  CHECK_THROWS_AS(lpmk::second_variation_fd(xi, -4.0, grid, {}), std::invalid_argument);
  CHECK_THROWS_AS(lpmk::second_variation_fd(xi, -4.0, grid, {-0.01}), std::invalid_argument);
  CHECK_THROWS_AS(lpmk::second_variation_fd(xi, -4.0, grid, {0.01, 0.01}),
                  std::invalid_argument);
}

TEST_CASE("instability thresholds match the closed form") {
  CHECK(lpmk::instability_threshold(1) == -7.0);
  CHECK(lpmk::instability_threshold(2) == -9.0);
  CHECK(lpmk::instability_threshold(3) == -11.0);
}

TEST_CASE("variational problems expose the invariant basis structure") {
  const lpmk::VariationalProblem p1(1, -8.0, 6, 96);
  CHECK(p1.basis_size() == 3);  // constant + frequencies 3 and 6
  CHECK(p1.mode_degree(0) == 0);
  CHECK(p1.first_mode_degree() == 3);
  CHECK(p1.mode_degree(2) == 6);

  const lpmk::VariationalProblem p2(2, -10.0, 4, 24);
  CHECK(p2.mode_degree(0) == 0);
  CHECK(p2.first_mode_degree() == 3);
  CHECK(p2.basis_size() >= 3);  // constant + degree 3 + degree 4

  CHECK_THROWS_AS(lpmk::VariationalProblem(1, -8.0, 2, 96), std::invalid_argument);
  CHECK_THROWS_AS(lpmk::VariationalProblem(3, -8.0, 6, 96), std::invalid_argument);
  CHECK_THROWS_AS(lpmk::VariationalProblem(1, 0.5, 6, 96), std::invalid_argument);
}

TEST_CASE("constant coordinates represent the unit ball exactly") {
  for (int n : {1, 2}) {
    const lpmk::VariationalProblem prob(n, -8.0 - n, 4, n == 1 ? 96 : 24);
    const std::vector<double> c = prob.constant_coefficients();
    const lpmk::SupportFunction u = prob.to_support(c);
    for (std::size_t i = 0; i < prob.grid().size(); i += 7) {
      CHECK(u.value(prob.grid().node(i)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    const lpmk::IterateDiagnostics d = prob.diagnostics(c);
    CHECK(d.lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.el_residual <= 1e-10);
    CHECK(d.min_w_eigenvalue == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.lp_error <= 1e-10);
    CHECK(prob.objective_value(c) ==
          doctest::Approx(-lpmk::sphere_area(n)).epsilon(1e-12));
  }
}

TEST_CASE("the composite gradient vanishes at the round critical point") {
  for (int n : {1, 2}) {
    for (double p : {-4.0 - n, -8.0 - n}) {
      const lpmk::VariationalProblem prob(n, p, 4, n == 1 ? 96 : 24);
      const std::vector<double> g =
          prob.composite_gradient(prob.constant_coefficients(), 0.0);
      CHECK(norm(g) <= 1e-10);
    }
  }
}

TEST_CASE("the composite gradient matches finite differences off the critical point") {
  // Mode amplitudes are k^2-amplified inside det W, so they stay small enough
  // to keep the candidate strictly convex with the hinge inactive.
  const lpmk::VariationalProblem prob(1, -8.0, 6, 128);
  std::vector<double> c = prob.constant_coefficients();
  c[1] = 0.02;
  c[2] = -0.008;
  c = prob.normalize_coefficients(c);
  REQUIRE(prob.diagnostics(c).min_w_eigenvalue > 10.0 * prob.settings().convexity_margin);
  const double wb = 1.0;
  const std::vector<double> g = prob.composite_gradient(c, wb);
  for (int axis = 0; axis < prob.basis_size(); ++axis) {
    const double eps = 1e-5;
    const auto probe = [&](double t) {
      std::vector<double> cc = c;
      cc[axis] += t;
      return prob.composite_value(prob.normalize_coefficients(cc), wb);
    };
    const double fd1 = (probe(eps) - probe(-eps)) / (2.0 * eps);
    const double fd2 = (probe(eps / 2.0) - probe(-eps / 2.0)) / eps;
    const double fd = (4.0 * fd2 - fd1) / 3.0;
    CHECK(std::abs(g[axis] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("the composite gradient matches finite differences on the active barrier band") {
  const lpmk::VariationalProblem prob(1, -8.0, 6, 128);
  std::vector<double> c = prob.constant_coefficients();
  c[1] = 0.124;
  c = prob.normalize_coefficients(c);
  // The smallest W-eigenvalue lands between the margin and the activation
  // level, so the hinge term contributes at a band of nodes.
  const lpmk::IterateDiagnostics d = prob.diagnostics(c);
  REQUIRE(d.min_w_eigenvalue > prob.settings().convexity_margin);
  REQUIRE(d.min_w_eigenvalue < 10.0 * prob.settings().convexity_margin);
  const double wb = 0.7;
  CHECK(prob.composite_value(c, wb) > prob.composite_value(c, 0.0));
  const std::vector<double> g = prob.composite_gradient(c, wb);
  for (int axis = 0; axis < prob.basis_size(); ++axis) {
    // Smaller eps than the generic case: the hinge has large high-order
    // derivatives near the margin.
    const double eps = 1e-6;
    const auto probe = [&](double t) {
      std::vector<double> cc = c;
      cc[axis] += t;
      return prob.composite_value(prob.normalize_coefficients(cc), wb);
    };
    const double fd1 = (probe(eps) - probe(-eps)) / (2.0 * eps);
    const double fd2 = (probe(eps / 2.0) - probe(-eps / 2.0)) / eps;
    const double fd = (4.0 * fd2 - fd1) / 3.0;
    CHECK(std::abs(g[axis] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("normalization in coordinates restores the constraint integral") {
  const lpmk::VariationalProblem prob(1, -8.0, 6, 128);
  std::vector<double> c = prob.seed_coefficients(0.05);
  const lpmk::IterateDiagnostics d = prob.diagnostics(c);
  CHECK(d.lp_error <= 1e-10);
  // Nonpositive functions are flagged instead of normalized.
  std::vector<double> bad = prob.constant_coefficients();
  bad[0] = 0.0;
  bad[1] = 0.0;
  bad[2] = 0.0;
  CHECK(!prob.normalize_in_place(bad));
  CHECK_THROWS_AS(prob.normalize_coefficients({0.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(prob.composite_gradient({1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("composite value applies the convexity barrier") {
  const lpmk::VariationalProblem prob(1, -8.0, 6, 128);
  // Far from the barrier the composite equals the raw objective.
  const std::vector<double> c = prob.constant_coefficients();
  CHECK(prob.composite_value(c, 1.0) ==
        doctest::Approx(prob.objective_value(c)).epsilon(1e-13));
  // A strongly non-convex candidate is rejected with an infinite value.
  std::vector<double> bad = prob.constant_coefficients();
  bad[1] = 0.8;
  CHECK(prob.composite_value(bad, 1.0) == std::numeric_limits<double>::infinity());
}

TEST_CASE("descent finds the symmetric branch below the threshold") {
  lpmk::OptimizerSettings st;
  st.max_iterations = 60000;
  // L = 24 keeps the subspace-truncation part of the Euler-Lagrange residual
  // around 1e-3, well inside the asserted bound.
  const lpmk::VariationalProblem prob(1, -8.0, 24, 128, st);
  const lpmk::CriticalPoint cp = lpmk::minimize(prob, 0.05);
  CHECK(cp.nonconstancy > 1e-2);
  CHECK(cp.objective < -2.0 * kPi - 1e-3);
  CHECK(cp.lambda > 0.0);
  CHECK(cp.el_residual < 1e-2);
  CHECK(cp.min_w_eigenvalue > prob.settings().convexity_margin);
  CHECK(cp.min_u > 0.0);
  CHECK(cp.max_u < 3.0);
  CHECK(cp.lp_constraint_error <= 1e-8);
  // Either full convergence or a stall-acceptance at a tiny gradient.
  CHECK(cp.gradient_norm <= 1e-6);
  // Coefficients and the reported support function agree.
  const lpmk::SupportFunction u = prob.to_support(cp.coefficients);
  CHECK(u.value(prob.grid().node(3)) ==
        doctest::Approx(cp.u.value(prob.grid().node(3))).epsilon(1e-12));
}

TEST_CASE("descent collapses to the ball above the threshold") {
  lpmk::OptimizerSettings st;
  st.max_iterations = 60000;
  const lpmk::VariationalProblem prob(1, -6.0, 6, 128, st);
  const lpmk::CriticalPoint cp = lpmk::minimize(prob, 0.05);
  CHECK(cp.nonconstancy <= 1e-4);
  CHECK(cp.objective == doctest::Approx(-2.0 * kPi).epsilon(1e-9));
}

TEST_CASE("iteration budgets are enforced with a diagnostic") {
  lpmk::OptimizerSettings st;
  st.max_iterations = 3;
  const lpmk::VariationalProblem prob(1, -8.0, 6, 128, st);
  CHECK_THROWS_AS(lpmk::minimize(prob, 0.05), std::runtime_error);
}
