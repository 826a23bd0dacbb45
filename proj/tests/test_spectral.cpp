#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "lpmk/parallel.hpp"
#include "lpmk/poly.hpp"
#include "lpmk/spectral.hpp"
#include "lpmk/sphere_geometry.hpp"

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("harmonic dimensions follow the closed form") {
  CHECK(lpmk::harmonic_dimension(1, 0) == 1);
  CHECK(lpmk::harmonic_dimension(2, 0) == 1);
  for (int mu = 1; mu <= 8; ++mu) {
    CHECK(lpmk::harmonic_dimension(1, mu) == 2);
    CHECK(lpmk::harmonic_dimension(2, mu) == 2 * mu + 1);
  }
}

TEST_CASE("exact harmonic bases have zero Laplacian and full dimension") {
  for (int n : {1, 2}) {
    for (int mu = 0; mu <= 6; ++mu) {
      const auto basis = lpmk::harmonic_basis_exact(n, mu);
      CHECK(static_cast<int>(basis.size()) == lpmk::harmonic_dimension(n, mu));
      for (const auto& p : basis) {
        CHECK(p.laplacian().is_zero());
        CHECK(p.is_homogeneous());
        CHECK(p.degree() == mu);
      }
    }
  }
}

TEST_CASE("orthonormal basis blocks have identity Gram matrices") {
  for (int n : {1, 2}) {
    const lpmk::HarmonicBasis hb(n, 5);
    const lpmk::SphereGrid grid(n, 64);
    const double alpha = lpmk::sphere_area(n);
    for (int mu = 0; mu <= 5; ++mu) {
      const auto& block = hb.degree(mu);
      CHECK(static_cast<int>(block.size()) == hb.dimension(mu));
      for (std::size_t i = 0; i < block.size(); ++i) {
        for (std::size_t j = i; j < block.size(); ++j) {
          // Exact monomial averages give the Gram entry to rounding.
          const auto prod = block[i] * block[j];
          const double entry = alpha * lpmk::sphere_average(prod);
          CHECK(std::abs(entry - (i == j ? 1.0 : 0.0)) <= 1e-11);
          // And it must agree with grid quadrature.
          const double q = lpmk::sum_terms_serial(grid.size(), [&](std::size_t k) {
            return grid.weight(k) * lpmk::eval_on_sphere(block[i], grid.node(k)) *
                   lpmk::eval_on_sphere(block[j], grid.node(k));
          });
          CHECK(std::abs(q - entry) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("total dimension accumulates the per-degree counts") {
  const lpmk::HarmonicBasis hb(2, 4);
  CHECK(hb.total_dimension() == std::size_t(1 + 3 + 5 + 7 + 9));
  CHECK(hb.n() == 2);
  CHECK(hb.max_degree() == 4);
}

TEST_CASE("eval_on_sphere restricts homogeneous polynomials correctly") {
  // p = x^2 - y^2 on S^1 is cos(2 theta).
  lpmk::Poly<double> p(2, 2);
  p.set({2, 0, 0}, 1.0);
  p.set({0, 2, 0}, -1.0);
  for (double theta : {0.1, 1.7, 3.0, 5.5}) {
    const double X[2] = {std::cos(theta), std::sin(theta)};
    CHECK(lpmk::eval_on_sphere(p, X) == doctest::Approx(std::cos(2.0 * theta)).epsilon(1e-14));
  }
}

TEST_CASE("sphere gradient is tangential and has the eigenvalue norm") {
  // For a degree-mu spherical harmonic Y, int |grad Y|^2 = mu(mu+n-1) int Y^2.
  for (int n : {1, 2}) {
    const lpmk::HarmonicBasis hb(n, 4);
    const lpmk::SphereGrid grid(n, 64);
    for (int mu : {1, 2, 3, 4}) {
      const auto& y = hb.degree(mu)[0];
      double grad_sq = 0.0, val_sq = 0.0, max_radial = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        double g[3] = {0.0, 0.0, 0.0};
        lpmk::sphere_gradient(y, grid.node(i), g);
        double g2 = 0.0, radial = 0.0;
        for (int v = 0; v <= n; ++v) {
          g2 += g[v] * g[v];
          radial += g[v] * grid.node(i)[v];
        }
        max_radial = std::max(max_radial, std::abs(radial));
        const double val = lpmk::eval_on_sphere(y, grid.node(i));
        grad_sq += grid.weight(i) * g2;
        val_sq += grid.weight(i) * val * val;
      }
      CHECK(max_radial <= 1e-12);
      CHECK(grad_sq / val_sq == doctest::Approx(mu * (mu + n - 1)).epsilon(1e-11));
      CHECK(lpmk::rayleigh_quotient(y, grid) ==
            doctest::Approx(mu * (mu + n - 1)).epsilon(1e-11));
    }
  }
}

TEST_CASE("substitution block matrices are orthogonal for orthogonal maps") {
  const lpmk::HarmonicBasis hb(2, 3);
  // Rotation by 90 degrees around the z axis.
  const std::vector<std::vector<double>> rot = {
      {0.0, -1.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}};
  for (int mu : {1, 2, 3}) {
    const Eigen::MatrixXd t = lpmk::substitution_block_matrix(hb, mu, rot);
    const Eigen::MatrixXd gram = t.transpose() * t;
    const int d = hb.dimension(mu);
    CHECK(t.rows() == d);
    CHECK((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-11);
  }

  // Consistency with pointwise substitution: f(M X) evaluated both ways.
  const int mu = 2;
  const auto& block = hb.degree(mu);
  std::vector<double> c(block.size(), 0.0);
  c[0] = 0.7;
  c[2] = -1.3;
  const Eigen::MatrixXd t = lpmk::substitution_block_matrix(hb, mu, rot);
  Eigen::VectorXd cv(static_cast<int>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) cv(static_cast<int>(i)) = c[i];
  const Eigen::VectorXd tc = t * cv;
  const lpmk::SphereGrid grid(2, 16);
  for (std::size_t i = 0; i < grid.size(); i += 13) {
    const double* X = grid.node(i);
    const double mx[3] = {rot[0][0] * X[0] + rot[0][1] * X[1] + rot[0][2] * X[2],
                          rot[1][0] * X[0] + rot[1][1] * X[1] + rot[1][2] * X[2],
                          rot[2][0] * X[0] + rot[2][1] * X[1] + rot[2][2] * X[2]};
    double direct = 0.0, mapped = 0.0;
    for (std::size_t k = 0; k < block.size(); ++k) {
      direct += c[k] * lpmk::eval_on_sphere(block[k], mx);
      mapped += tc(static_cast<int>(k)) * lpmk::eval_on_sphere(block[k], X);
    }
    CHECK(mapped == doctest::Approx(direct).epsilon(1e-11));
  }
}

TEST_CASE("quadrature integrates harmonic products exactly at moderate degree") {
  // int Y^2 over S^n equals 1 for orthonormal elements; also check the mean of
  // any mu >= 1 element vanishes.
  for (int n : {1, 2}) {
    const lpmk::HarmonicBasis hb(n, 3);
    const lpmk::SphereGrid grid(n, 32);
    for (int mu : {1, 2, 3}) {
      for (const auto& y : hb.degree(mu)) {
        const double mean = lpmk::sum_terms_serial(grid.size(), [&](std::size_t i) {
          return grid.weight(i) * lpmk::eval_on_sphere(y, grid.node(i));
        });
        CHECK(std::abs(mean) <= 1e-12);
      }
    }
  }
}
