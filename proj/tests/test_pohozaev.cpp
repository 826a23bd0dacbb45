#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "lpmk/parallel.hpp"
#include "lpmk/pohozaev.hpp"
#include "lpmk/sphere_function.hpp"
#include "lpmk/sphere_geometry.hpp"
#include "lpmk/support_function.hpp"

namespace {
constexpr double kPi = std::numbers::pi;

lpmk::ProjectiveField dilation_field_1d(double d) {
  lpmk::ProjectiveField pf;
  pf.n = 1;
  pf.d = d;
  return pf;
}
}  // namespace

TEST_CASE("field validation rejects asymmetric or traceful generators") {
  lpmk::ProjectiveField pf;
  pf.n = 2;
  pf.a = {0.1, 0.2, 0.2, -0.1};
  CHECK_NOTHROW(lpmk::validate_projective_field(pf));
  pf.a = {0.1, 0.2, 0.3, -0.1};  // not symmetric
  CHECK_THROWS_AS(lpmk::validate_projective_field(pf), std::invalid_argument);
  pf.a = {0.1, 0.2, 0.2, 0.1};  // trace 0.2
  CHECK_THROWS_AS(lpmk::validate_projective_field(pf), std::invalid_argument);
  pf.n = 3;
  CHECK_THROWS_AS(lpmk::validate_projective_field(pf), std::invalid_argument);
}

TEST_CASE("random fields are deterministic, valid, and seed-sensitive") {
  for (int n : {1, 2}) {
    const lpmk::ProjectiveField a = lpmk::random_projective_field(n, 7);
    const lpmk::ProjectiveField b = lpmk::random_projective_field(n, 7);
    const lpmk::ProjectiveField c = lpmk::random_projective_field(n, 8);
    CHECK_NOTHROW(lpmk::validate_projective_field(a));
    CHECK(a.d == b.d);
    CHECK(a.b[0] == b.b[0]);
    CHECK(a.c[0] == b.c[0]);
    CHECK(a.a[0] == b.a[0]);
    CHECK(a.d != c.d);
  }
}

TEST_CASE("lambda matrix assembles the homogeneous generator blocks") {
  lpmk::ProjectiveField pf;
  pf.n = 1;
  pf.b = {0.5, 0.0};
  pf.c = {-0.25, 0.0};
  pf.d = 0.75;
  const std::array<double, 9> m = lpmk::lambda_matrix(pf);
  // Row-major 2x2: [[A, B], [C, D]].
  CHECK(m[0] == 0.0);
  CHECK(m[1] == 0.5);
  CHECK(m[2] == -0.25);
  CHECK(m[3] == 0.75);
}

TEST_CASE("sphere field agrees with the chart field off the equator") {
  for (int n : {1, 2}) {
    const lpmk::SphereGrid grid(n, 32);
    for (std::uint64_t seed : {1ULL, 5ULL}) {
      const lpmk::ProjectiveField pf = lpmk::random_projective_field(n, seed);
      for (std::size_t i = 0; i < grid.size(); i += 3) {
        const double* X = grid.node(i);
        double global[3] = {0.0, 0.0, 0.0};
        lpmk::field_on_sphere(pf, X, global);
        const lpmk::ChartPoint cp = lpmk::project_point(n, X);
        double chart[3] = {0.0, 0.0, 0.0};
        lpmk::chart_field(pf, cp, chart);
        for (int v = 0; v <= n; ++v) CHECK(std::abs(global[v] - chart[v]) <= 1e-11);
        // Tangency of the global form.
        double dot = 0.0;
        for (int v = 0; v <= n; ++v) dot += global[v] * X[v];
        CHECK(std::abs(dot) <= 1e-13);
      }
    }
  }
}

TEST_CASE("beta weight matches a hand value and the critical exponent kills it") {
  // For n=1, gamma_p = (p+2)/2; at X=(1,0) only tr Lambda = D survives.
  const lpmk::ProjectiveField pf = dilation_field_1d(-0.5);
  const double X[2] = {1.0, 0.0};
  CHECK(lpmk::beta_weight(pf, X, -4.0) == doctest::Approx(0.5).epsilon(1e-15));
  // p = -n-1 zeroes beta identically.
  const lpmk::SphereGrid grid(1, 16);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(lpmk::beta_weight(pf, grid.node(i), -2.0) == 0.0);
  }
}

TEST_CASE("rotation generators produce zero beta") {
  // Antisymmetric Lambda: A = 0, B = -C, D = 0.
  lpmk::ProjectiveField pf;
  pf.n = 2;
  pf.b = {0.4, -0.7};
  pf.c = {-0.4, 0.7};
  pf.d = 0.0;
  const lpmk::SphereGrid grid(2, 16);
  for (std::size_t i = 0; i < grid.size(); i += 7) {
    CHECK(std::abs(lpmk::beta_weight(pf, grid.node(i), -5.0)) <= 1e-15);
  }
}

TEST_CASE("beta has exact zero mean over the sphere") {
  for (int n : {1, 2}) {
    const lpmk::SphereGrid grid(n, 64);
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const lpmk::ProjectiveField pf = lpmk::random_projective_field(n, seed);
      for (double p : {-3.0, -4.5, -6.0}) {
        const double mean = lpmk::sum_terms_serial(grid.size(), [&](std::size_t i) {
          return grid.weight(i) * lpmk::beta_weight(pf, grid.node(i), p);
        });
        CHECK(std::abs(mean) <= 1e-12);
      }
    }
  }
}

TEST_CASE("beta is linear in the generator") {
  const lpmk::ProjectiveField pf1 = lpmk::random_projective_field(2, 3);
  const lpmk::ProjectiveField pf2 = lpmk::random_projective_field(2, 4);
  lpmk::ProjectiveField sum;
  sum.n = 2;
  for (int k = 0; k < 4; ++k) sum.a[k] = pf1.a[k] + pf2.a[k];
  for (int k = 0; k < 2; ++k) {
    sum.b[k] = pf1.b[k] + pf2.b[k];
    sum.c[k] = pf1.c[k] + pf2.c[k];
  }
  sum.d = pf1.d + pf2.d;
  const lpmk::SphereGrid grid(2, 16);
  for (std::size_t i = 0; i < grid.size(); i += 13) {
    const double* X = grid.node(i);
    const double lhs = lpmk::beta_weight(sum, X, -4.0);
    const double rhs = lpmk::beta_weight(pf1, X, -4.0) + lpmk::beta_weight(pf2, X, -4.0);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    double v1[3], v2[3], vs[3];
    lpmk::field_on_sphere(pf1, X, v1);
    lpmk::field_on_sphere(pf2, X, v2);
    lpmk::field_on_sphere(sum, X, vs);
    for (int v = 0; v < 3; ++v) CHECK(std::abs(vs[v] - v1[v] - v2[v]) <= 1e-13);
  }
}

TEST_CASE("chart sigma follows the divergence formula") {
  lpmk::ProjectiveField pf;
  pf.n = 1;
  pf.c = {0.3, 0.0};
  pf.d = 0.8;
  const double x[1] = {1.7};
  // sigma = C.x - n D/(n+1).
  CHECK(lpmk::chart_sigma(pf, x) == doctest::Approx(0.3 * 1.7 - 0.8 / 2.0).epsilon(1e-15));
}

TEST_CASE("identity integral vanishes on solved ellipse configurations") {
  // Every origin-symmetric ellipse with ab=1 solves det W = h^{-3} times a
  // constant at p = -2; the identity integral must vanish for every field.
  const lpmk::SphereGrid grid(1, 256);
  const lpmk::ConstantFunction f(1, 1.0);
  for (double a : {1.1, 1.6}) {
    const lpmk::SupportFunction h = lpmk::SupportFunction::ellipse(a, 1.0 / a);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      const lpmk::ProjectiveField pf = lpmk::random_projective_field(1, seed);
      CHECK(std::abs(lpmk::identity_integral(f, h, -2.0, pf, grid)) <= 1e-9);
    }
  }
}

TEST_CASE("identity integral reduces to the beta mean for constant data") {
  // h = 1, f = 1: the integrand is exactly beta, whose mean vanishes.
  for (int n : {1, 2}) {
    const lpmk::SphereGrid grid(n, 64);
    const lpmk::ConstantFunction f(n, 1.0);
    const lpmk::SupportFunction h = lpmk::SupportFunction::constant(n, 1.0);
    for (std::uint64_t seed = 2; seed <= 5; ++seed) {
      const lpmk::ProjectiveField pf = lpmk::random_projective_field(n, seed);
      for (double p : {-3.0, -4.0, -6.0}) {
        CHECK(std::abs(lpmk::identity_integral(f, h, p, pf, grid)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("identity integral detects non-solutions") {
  // h = 1 does not solve the equation for the weight 1 + 0.3 x^2, and the
  // dilation field notices: the integrand averages to -0.15 per unit angle.
  lpmk::Poly<double> bump(2, 2);
  bump.set({2, 0, 0}, 0.3);
  lpmk::Poly<double> one = lpmk::Poly<double>::constant(2, 1.0);
  const lpmk::PolynomialFunction f(one + bump);
  const lpmk::SupportFunction h = lpmk::SupportFunction::constant(1, 1.0);
  const lpmk::SphereGrid grid(1, 128);
  const lpmk::ProjectiveField pf = dilation_field_1d(1.0);
  const double value = lpmk::identity_integral(f, h, -4.0, pf, grid);
  CHECK(value == doctest::Approx(-0.15 * 2.0 * kPi).epsilon(1e-10));
}
