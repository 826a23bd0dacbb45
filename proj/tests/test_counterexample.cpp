#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "lpmk/counterexample.hpp"
#include "lpmk/sphere_function.hpp"
#include "lpmk/sphere_geometry.hpp"

TEST_CASE("critical weight evaluates the pole-equator profile") {
  const lpmk::CriticalWeight f = lpmk::critical_f(1, 4.0, 1.0);
  const double pole[2] = {0.0, -1.0};
  CHECK(f.value(pole) == doctest::Approx(2.0).epsilon(1e-15));
  const double tilted[2] = {std::sin(0.7), -std::cos(0.7)};
  CHECK(f.value(tilted) == doctest::Approx(std::pow(std::cos(0.7), 4.0) + 1.0).epsilon(1e-14));
  CHECK(f.exponent() == 4.0);
  CHECK(f.offset() == 1.0);
  CHECK_THROWS_AS(lpmk::critical_f(1, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lpmk::critical_f(1, 4.0, -0.5), std::invalid_argument);
}

TEST_CASE("critical weight gradient matches finite differences on both spheres") {
  for (int n : {1, 2}) {
    const lpmk::CriticalWeight f = lpmk::critical_f(n, 3.0, 0.5);
    const lpmk::SphereGrid grid(n, 16);
    for (std::size_t i = 0; i < grid.size(); i += 5) {
      const double* X = grid.node(i);
      double g[3] = {0.0, 0.0, 0.0};
      f.gradient(X, g);
      // Tangency.
      double dot = 0.0;
      for (int v = 0; v <= n; ++v) dot += g[v] * X[v];
      CHECK(std::abs(dot) <= 1e-12);
      // Central difference along a tangent direction.
      double t[3] = {-X[1], X[0], 0.0};
      double norm = std::sqrt(t[0] * t[0] + t[1] * t[1]);
      if (norm < 1e-8) continue;
      for (double& v : t) v /= norm;
      const double eps = 1e-6;
      double xp[3], xm[3];
      for (int v = 0; v <= n; ++v) {
        xp[v] = X[v] + eps * t[v];
        xm[v] = X[v] - eps * t[v];
      }
      double np = 0.0, nm = 0.0;
      for (int v = 0; v <= n; ++v) {
        np += xp[v] * xp[v];
        nm += xm[v] * xm[v];
      }
      np = std::sqrt(np);
      nm = std::sqrt(nm);
      for (int v = 0; v <= n; ++v) {
        xp[v] /= np;
        xm[v] /= nm;
      }
      const double fd = (f.value(xp) - f.value(xm)) / (2.0 * eps);
      double directional = 0.0;
      for (int v = 0; v <= n; ++v) directional += g[v] * t[v];
      CHECK(std::abs(directional - fd) <= 1e-6 * (1.0 + std::abs(fd)));
    }
  }
}

TEST_CASE("critical weights certify insolvability at the critical exponent") {
  const lpmk::CriticalWeight f1 = lpmk::critical_f(1, 4.0, 1.0);
  const lpmk::SphereGrid g1(1, 512);
  const lpmk::InsolvabilityCertificate c1 = lpmk::certify_insolvability(f1, -2.0, g1);
  CHECK(c1.certified);
  CHECK(c1.max_kf <= lpmk::kCertifyMaxTolerance);
  CHECK(c1.strict_fraction >= lpmk::kCertifyStrictFraction);

  const lpmk::CriticalWeight f2 = lpmk::critical_f(2, 3.0, 0.5);
  const lpmk::SphereGrid g2(2, 64);
  const lpmk::InsolvabilityCertificate c2 = lpmk::certify_insolvability(f2, -3.0, g2);
  CHECK(c2.certified);
}

TEST_CASE("constant weights are not certifiable") {
  // K_f for f = 1 reduces to beta, which has zero mean: it cannot be strictly
  // negative almost everywhere.
  const lpmk::ConstantFunction f(1, 1.0);
  const lpmk::SphereGrid grid(1, 128);
  lpmk::ProjectiveField pf;
  pf.n = 1;
  pf.d = -2.0;
  const lpmk::InsolvabilityCertificate cert = lpmk::certify_insolvability(f, -2.0, grid, pf);
  CHECK(!cert.certified);
}

TEST_CASE("radial weight resolution fixes the value at radius one") {
  // f(1) = beta0 * G(1)^gamma with G(1) = 2^{(n+1)/2}.
  for (int n : {1, 2}) {
    lpmk::RadialWeight w;
    w.n = n;
    w.p = -(n + 3.0);
    const lpmk::RadialWeightFunction f = lpmk::resolve_radial_f(w);
    const double expected = f.beta0() * std::pow(2.0, f.gamma() * (n + 1) / 2.0);
    CHECK(f.radial_value(1.0) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(f.gamma() == doctest::Approx((w.p + n + 1.0) / (n + 1.0)).epsilon(1e-15));
    CHECK(f.gamma() < 0.0);
  }
}

TEST_CASE("radial weight parameter validation") {
  lpmk::RadialWeight w;
  w.n = 1;
  w.p = -2.0;  // not below the critical exponent
  CHECK_THROWS_AS(lpmk::resolve_radial_f(w), std::invalid_argument);
  w.p = -4.0;
  w.phi_k = 1;  // decays too slowly: n|gamma| = 1 needs k > 1
  CHECK_THROWS_AS(lpmk::resolve_radial_f(w), std::invalid_argument);
  w.phi_k = 0;
  w.phi_inf = -1.0;
  CHECK_THROWS_AS(lpmk::resolve_radial_f(w), std::invalid_argument);
}

TEST_CASE("user beta0 policy is honored and bounded below") {
  lpmk::RadialWeight w;
  w.n = 1;
  w.p = -4.0;
  const lpmk::RadialWeightFunction base = lpmk::resolve_radial_f(w);
  // A user value below the positivity bound is rejected.
  w.beta0 = 0.5 * base.beta0_lower_bound();
  CHECK_THROWS_AS(lpmk::resolve_radial_f(w), std::invalid_argument);
  // A generous user value is accepted and recorded.
  w.beta0 = base.beta0_lower_bound() + 1.0;
  const lpmk::RadialWeightFunction user = lpmk::resolve_radial_f(w);
  CHECK(user.beta0_policy() == lpmk::Beta0Policy::kUser);
  CHECK(user.beta0() == w.beta0);
  // f is monotone in beta0 at fixed radius.
  CHECK(user.radial_value(2.0) > base.radial_value(2.0));
  CHECK(user.radial_value(0.3) > base.radial_value(0.3));
}

TEST_CASE("automatic beta0 picks the matched constant when admissible") {
  // At p = -3 the tail-matched constant clears the positivity bound.
  lpmk::RadialWeight w;
  w.n = 1;
  w.p = -3.0;
  const lpmk::RadialWeightFunction matched = lpmk::resolve_radial_f(w);
  CHECK(matched.beta0_policy() == lpmk::Beta0Policy::kMatched);
  CHECK(matched.beta0() > matched.beta0_lower_bound());
  // At p = -4 the matched constant lands exactly on the bound (the matching
  // and positivity integrals cancel in closed form), so the resolver must
  // fall back to the safe default.
  w.p = -4.0;
  const lpmk::RadialWeightFunction fallback = lpmk::resolve_radial_f(w);
  CHECK(fallback.beta0_policy() == lpmk::Beta0Policy::kDefault);
  CHECK(fallback.beta0() == doctest::Approx(2.0 * fallback.beta0_lower_bound()).epsilon(1e-12));
}

TEST_CASE("radial weights are positive with the expected pole and tail") {
  lpmk::RadialWeight w;
  w.n = 2;
  w.p = -5.0;
  const lpmk::RadialWeightFunction f = lpmk::resolve_radial_f(w);
  const double pole_exponent = 2.0 * std::abs(f.gamma());
  // Below the table the continuation is a pure power law r^{n|gamma|}.
  const double r0 = 1e-8, r1 = 2e-8;
  CHECK(f.radial_value(r1) / f.radial_value(r0) ==
        doctest::Approx(std::pow(r1 / r0, pole_exponent)).epsilon(1e-12));
  // Large radii approach the finite limit phi_inf/|gamma|.
  CHECK(f.radial_value(1e6) ==
        doctest::Approx(f.phi_inf() / std::abs(f.gamma())).epsilon(1e-3));
  // Positivity across the table.
  for (std::size_t j = 0; j < f.table_size(); j += 97) CHECK(f.table_value(j) > 0.0);
  CHECK_THROWS_AS(f.radial_value(-1.0), std::invalid_argument);
}

TEST_CASE("tabulated values track the direct quadrature evaluation") {
  lpmk::RadialWeight w;
  w.n = 1;
  w.p = -4.0;
  const lpmk::RadialWeightFunction f = lpmk::resolve_radial_f(w);
  for (double r : {0.01, 0.37, 1.0, 5.3, 120.0}) {
    CHECK(f.radial_value(r) == doctest::Approx(f.evaluate_exact(r)).epsilon(1e-9));
  }
}

TEST_CASE("sphere extension is mirror symmetric across the equator") {
  lpmk::RadialWeight w;
  w.n = 2;
  w.p = -6.0;
  const lpmk::RadialWeightFunction f = lpmk::resolve_radial_f(w);
  const lpmk::SphereGrid grid(2, 16);
  for (std::size_t i = 0; i < grid.size(); i += 3) {
    const double* X = grid.node(i);
    const double mirrored[3] = {X[0], X[1], -X[2]};
    CHECK(f.value(X) == f.value(mirrored));
  }
}

TEST_CASE("the defining ordinary differential equation holds along the field") {
  // K_f = -r f' + gamma (r^2 - n)/(1 + r^2) f must equal -phi(r).
  for (int n : {1, 2}) {
    lpmk::RadialWeight w;
    w.n = n;
    w.p = -(n + 4.0);
    const lpmk::RadialWeightFunction f = lpmk::resolve_radial_f(w);
    double worst = 0.0;
    for (int k = 0; k <= 100; ++k) {
      const double r = std::pow(10.0, -2.0 + 4.0 * k / 100.0);
      const double kf = -f.log_derivative(r) +
                        f.gamma() * (r * r - n) / (1.0 + r * r) * f.radial_value(r);
      worst = std::max(worst, std::abs(kf + f.phi(r)));
    }
    CHECK(worst <= 1e-7);
  }
}

TEST_CASE("radial weights certify insolvability on the sphere") {
  lpmk::RadialWeight w;
  w.n = 1;
  w.p = -4.0;
  const lpmk::RadialWeightFunction f = lpmk::resolve_radial_f(w);
  const lpmk::SphereGrid grid(1, 256);
  const lpmk::InsolvabilityCertificate cert = lpmk::certify_insolvability(f, w.p, grid);
  CHECK(cert.certified);
  CHECK(cert.max_kf <= lpmk::kCertifyMaxTolerance);
  // The profile itself is within rounding of -phi at the nodes.
  const std::vector<double> profile = lpmk::kf_profile(f, w.p, grid, f.certification_field());
  CHECK(profile.size() == grid.size());
  for (std::size_t i = 0; i < profile.size(); i += 31) {
    const double* X = grid.node(i);
    const double r = std::abs(X[0] / X[1]);
    CHECK(std::abs(profile[i] + f.phi(r)) <= 1e-7);
  }
}
