#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <optional>

#include "doctest.h"
#include "lpmk/ode_oracle.hpp"
#include "lpmk/sphere_geometry.hpp"
#include "lpmk/support_function.hpp"

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("small-amplitude period limit follows the linearization") {
  CHECK(lpmk::period_limit(-2.0) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(lpmk::period_limit(-7.0) == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-15));
  CHECK(lpmk::period_limit(-14.0) == doctest::Approx(2.0 * kPi / 4.0).epsilon(1e-15));
}

TEST_CASE("the p = -2 oscillator is isochronous") {
  // h'' + h = h^{-3} has period pi for every amplitude: a classical
  // closed-form check of the integrator and event location.
  for (double h0 : {1.1, 1.3, 2.0, 3.5}) {
    CHECK(lpmk::period_map(-2.0, h0) == doctest::Approx(kPi).epsilon(1e-9));
  }
}

TEST_CASE("period map rejects degenerate starts") {
  CHECK_THROWS_AS(lpmk::period_map(-4.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lpmk::period_map(-4.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(lpmk::period_map(-4.0, 1.0), std::invalid_argument);
}

TEST_CASE("energy is conserved to integrator accuracy") {
  CHECK(lpmk::max_energy_drift(-8.0, 1.5, 20.0) <= 1e-10);
  CHECK(lpmk::max_energy_drift(-3.0, 1.05, 50.0) <= 1e-10);
}

TEST_CASE("period map grows from the linearized limit") {
  // Just off the equilibrium the period approaches 2 pi / sqrt(2 - p).
  for (double p : {-4.0, -8.0}) {
    const double near = lpmk::period_map(p, 1.0 + 1e-5);
    CHECK(near == doctest::Approx(lpmk::period_limit(p)).epsilon(1e-6));
    // And it increases with amplitude.
    CHECK(lpmk::period_map(p, 1.5) > near);
  }
}

TEST_CASE("three-fold orbits exist exactly below the threshold") {
  CHECK(lpmk::symmetric_solution_exists(-8.0));
  CHECK(lpmk::symmetric_solution_exists(-7.05));
  CHECK(!lpmk::symmetric_solution_exists(-6.0));
  CHECK(!lpmk::symmetric_solution_exists(-6.95));
}

TEST_CASE("bifurcation point sits at the threshold exponent") {
  const double threshold = lpmk::bifurcation_point(-8.0, -6.0, 1e-3);
  CHECK(std::abs(threshold - (-7.0)) <= 1e-3);
  CHECK_THROWS_AS(lpmk::bifurcation_point(-6.0, -8.0, 1e-3), std::invalid_argument);
}

TEST_CASE("the resolved orbit at p = -8 matches frozen reference data") {
  const std::optional<lpmk::SymmetricSolution> sol = lpmk::find_symmetric_solution(-8.0);
  REQUIRE(sol.has_value());
  CHECK(sol->p == -8.0);
  // Reference amplitude from an independent energy-quadrature computation
  // (turning-point integrals with Gauss-Legendre in extended precision).
  CHECK(sol->h0 == doctest::Approx(1.2074665286838).epsilon(1e-8));
  CHECK(sol->period == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-9));
  CHECK(sol->h_max == doctest::Approx(sol->h0).epsilon(1e-12));
  CHECK(sol->h_min < 1.0);
  CHECK(sol->h_min > 0.5);
  // The lift solves det W = h^{p-1} on S^1 to high accuracy.
  CHECK(sol->lift_residual <= 1e-8);
  CHECK(sol->lift.n() == 1);
  // Non-constant, three-fold symmetric: frequency-three content dominates.
  const auto& c = sol->lift.coefficients();
  REQUIRE(c.size() >= 7);
  CHECK(std::abs(c[5]) > 1e-2);  // a_3
  // Objective value frozen from the same independent computation.
  CHECK(sol->objective == doctest::Approx(-6.3160908333183).epsilon(1e-9));
  CHECK(sol->objective < -2.0 * kPi);
}

TEST_CASE("no orbit is reported above the threshold") {
  CHECK(!lpmk::find_symmetric_solution(-6.0).has_value());
}

TEST_CASE("cross validation recovers scalings and rotations") {
  const std::optional<lpmk::SymmetricSolution> sol = lpmk::find_symmetric_solution(-8.0);
  REQUIRE(sol.has_value());
  const lpmk::SupportFunction& ref = sol->lift;

  // Identity comparison.
  const lpmk::CrossValidation same = lpmk::cross_validate(ref, -8.0, ref, -8.0, 1.0);
  CHECK(same.scale == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(same.distance <= 1e-10);

  // A scaled candidate with the matching multiplier maps back onto the
  // reference: u = c h solves det W = lambda u^{p-1} with lambda = c^{2-p}.
  const double c = 1.7;
  const double lambda = std::pow(c, 2.0 - (-8.0));
  const lpmk::CrossValidation scaled =
      lpmk::cross_validate(ref, -8.0, ref.scaled(c), -8.0, lambda);
  CHECK(scaled.scale == doctest::Approx(1.0 / c).epsilon(1e-10));
  CHECK(scaled.distance <= 1e-8);

  // A rotated candidate is aligned by the phase search.
  const double ang = 0.35;
  const std::vector<std::vector<double>> rot = {{std::cos(ang), -std::sin(ang)},
                                                {std::sin(ang), std::cos(ang)}};
  const lpmk::CrossValidation rotated =
      lpmk::cross_validate(ref, -8.0, ref.rotated(rot), -8.0, 1.0);
  CHECK(rotated.distance <= 1e-7);

  // Mismatched exponents are rejected.
  CHECK_THROWS_AS(lpmk::cross_validate(ref, -8.0, ref, -7.5, 1.0), std::invalid_argument);
}
