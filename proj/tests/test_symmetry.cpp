#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "lpmk/parallel.hpp"
#include "lpmk/spectral.hpp"
#include "lpmk/sphere_geometry.hpp"
#include "lpmk/symmetry.hpp"

TEST_CASE("simplex frames satisfy the exact invariants") {
  for (int n : {1, 2}) {
    const lpmk::SimplexFrame frame = lpmk::simplex_vertices(n);
    CHECK(frame.n == n);
    CHECK(static_cast<int>(frame.vertices.size()) == n + 2);
    CHECK_NOTHROW(lpmk::validate_frame(frame));
    // Double copies are unit vectors with mutual inner product -1/(n+1).
    for (int i = 0; i < n + 2; ++i) {
      double norm2 = 0.0;
      for (int v = 0; v <= n; ++v) norm2 += frame.vertices_d[i][v] * frame.vertices_d[i][v];
      CHECK(std::abs(norm2 - 1.0) <= 1e-14);
      for (int j = i + 1; j < n + 2; ++j) {
        double dot = 0.0;
        for (int v = 0; v <= n; ++v) dot += frame.vertices_d[i][v] * frame.vertices_d[j][v];
        CHECK(std::abs(dot + 1.0 / (n + 1)) <= 1e-14);
      }
    }
  }
}

TEST_CASE("group orders match the permutation counts") {
  // Full group = all vertex permutations, special = index-two subgroup.
  const lpmk::SimplexFrame f1 = lpmk::simplex_vertices(1);
  CHECK(lpmk::build_group(f1, false).order() == 6);
  CHECK(lpmk::build_group(f1, true).order() == 3);
  const lpmk::SimplexFrame f2 = lpmk::simplex_vertices(2);
  CHECK(lpmk::build_group(f2, false).order() == 24);
  CHECK(lpmk::build_group(f2, true).order() == 12);
  CHECK(lpmk::trivial_group(1).order() == 1);
}

TEST_CASE("group elements are orthogonal and permute the vertices") {
  for (int n : {1, 2}) {
    const lpmk::SimplexFrame frame = lpmk::simplex_vertices(n);
    const lpmk::SymmetryGroup g = lpmk::build_group(frame, false);
    for (std::size_t e = 0; e < g.order(); ++e) {
      const lpmk::GroupElement& el = g.element(e);
      CHECK((el.det == 1 || el.det == -1));
      for (int i = 0; i < n + 2; ++i) {
        double out[3] = {0.0, 0.0, 0.0};
        el.apply(n, frame.vertices_d[i].data(), out);
        const int target = el.permutation[i];
        for (int v = 0; v <= n; ++v)
          CHECK(std::abs(out[v] - frame.vertices_d[target][v]) <= 1e-13);
      }
    }
    // Special group keeps only determinant +1 elements.
    const lpmk::SymmetryGroup gs = lpmk::build_group(frame, true);
    for (std::size_t e = 0; e < gs.order(); ++e) CHECK(gs.element(e).det == 1);
  }
}

TEST_CASE("low harmonic degrees carry no invariants but degree three does") {
  for (int n : {1, 2}) {
    for (bool special : {false, true}) {
      const lpmk::SymmetryGroup g = lpmk::build_group(lpmk::simplex_vertices(n), special);
      CHECK(lpmk::invariant_dimension(n, 1, g).dimension == 0);
      CHECK(lpmk::invariant_dimension(n, 2, g).dimension == 0);
      CHECK(lpmk::invariant_dimension(n, 3, g).dimension >= 1);
      CHECK(lpmk::lambda1(n, g) == 3.0 * (n + 2));
    }
  }
  // Without symmetry the first eigenvalue comes from degree one.
  CHECK(lpmk::lambda1(1, lpmk::trivial_group(1)) == 1.0);
  CHECK(lpmk::lambda1(2, lpmk::trivial_group(2)) == 2.0);
}

TEST_CASE("invariant bases are orthonormal, invariant, and consistently embedded") {
  for (int n : {1, 2}) {
    const lpmk::SymmetryGroup g = lpmk::build_group(lpmk::simplex_vertices(n), false);
    const lpmk::HarmonicBasis hb(n, 4);
    const lpmk::SphereGrid grid(n, 24);
    for (int mu : {3, 4}) {
      const lpmk::InvariantSubspace inv = lpmk::invariant_dimension(n, mu, g);
      CHECK(static_cast<int>(inv.basis.size()) == inv.dimension);
      CHECK(inv.coefficients.size() == inv.basis.size());
      for (int b = 0; b < inv.dimension; ++b) {
        // Coefficient columns are unit vectors over the orthonormal block.
        double norm2 = 0.0;
        for (double c : inv.coefficients[b]) norm2 += c * c;
        CHECK(std::abs(norm2 - 1.0) <= 1e-10);
        CHECK(inv.coefficients[b].size() == hb.degree(mu).size());
        for (std::size_t i = 0; i < grid.size(); i += 5) {
          const double* X = grid.node(i);
          const double direct = lpmk::eval_on_sphere(inv.basis[b], X);
          // Assembling the column over the orthonormal block gives the same
          // function.
          double assembled = 0.0;
          for (std::size_t k = 0; k < inv.coefficients[b].size(); ++k)
            assembled += inv.coefficients[b][k] * lpmk::eval_on_sphere(hb.degree(mu)[k], X);
          CHECK(std::abs(assembled - direct) <= 1e-10);
          // Invariance under every group element.
          for (std::size_t e = 0; e < g.order(); ++e) {
            double gx[3] = {0.0, 0.0, 0.0};
            g.element(e).apply(n, X, gx);
            CHECK(std::abs(lpmk::eval_on_sphere(inv.basis[b], gx) - direct) <= 1e-11);
          }
        }
      }
    }
  }
}

TEST_CASE("degree-three witness is exactly harmonic with eigenvalue 3(n+2)") {
  for (int n : {1, 2}) {
    const lpmk::SimplexFrame frame = lpmk::simplex_vertices(n);
    const lpmk::Poly<lpmk::QuadExt> h = lpmk::build_h_simplex(frame);
    CHECK(h.laplacian().is_zero());
    CHECK(h.degree() == 3);
    CHECK(h.is_homogeneous());

    lpmk::Poly<double> hd = h.convert<double>();
    const lpmk::SphereGrid grid(n, 64);
    CHECK(lpmk::rayleigh_quotient(hd, grid) ==
          doctest::Approx(3.0 * (n + 2)).epsilon(1e-10));
    // Odd function: zero sphere mean by quadrature.
    const double mean = lpmk::sum_terms_serial(grid.size(), [&](std::size_t i) {
      return grid.weight(i) * lpmk::eval_on_sphere(hd, grid.node(i));
    });
    CHECK(std::abs(mean) <= 1e-12);
  }
}

TEST_CASE("polynomial symmetrization is an invariant projection") {
  const lpmk::SymmetryGroup g = lpmk::build_group(lpmk::simplex_vertices(2), false);
  lpmk::Poly<double> p(3, 3);
  p.set({3, 0, 0}, 1.0);
  p.set({1, 1, 1}, 0.5);
  const lpmk::Poly<double> sp = lpmk::symmetrize(g, p);
  const lpmk::Poly<double> spp = lpmk::symmetrize(g, sp);
  // Idempotent and invariant at sample points.
  const lpmk::SphereGrid grid(2, 16);
  for (std::size_t i = 0; i < grid.size(); i += 17) {
    const double* X = grid.node(i);
    CHECK(lpmk::eval_on_sphere(spp, X) ==
          doctest::Approx(lpmk::eval_on_sphere(sp, X)).epsilon(1e-12));
    double gx[3];
    g.element(5).apply(2, X, gx);
    CHECK(std::abs(lpmk::eval_on_sphere(sp, gx) - lpmk::eval_on_sphere(sp, X)) <= 1e-12);
  }
}

TEST_CASE("nodal symmetrization averages over group orbits") {
  const lpmk::SymmetryGroup g = lpmk::build_group(lpmk::simplex_vertices(1), false);
  const lpmk::SphereGrid grid(1, 48);  // divisible by 6, closed under the group
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double theta = std::atan2(grid.node(i)[1], grid.node(i)[0]);
    values[i] = std::cos(theta) + 2.0 * std::sin(3.0 * theta);
  }
  const std::vector<double> sym = lpmk::symmetrize(g, grid, values);
  // cos(theta) averages out; the invariant part of sin(3 theta) survives.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double theta = std::atan2(grid.node(i)[1], grid.node(i)[0]);
    CHECK(std::abs(sym[i] - 2.0 * std::sin(3.0 * theta)) <= 1e-12);
  }
  // Grids not closed under the group are rejected.
  const lpmk::SphereGrid bad(1, 50);
  std::vector<double> vb(bad.size(), 1.0);
  CHECK_THROWS_AS(lpmk::symmetrize(g, bad, vb), std::invalid_argument);
}

TEST_CASE("trigonometric invariant modes match the projector dimensions") {
  for (bool special : {false, true}) {
    const lpmk::SymmetryGroup g = lpmk::build_group(lpmk::simplex_vertices(1), special);
    const int k_max = 12;
    const std::vector<lpmk::TrigMode> modes = lpmk::invariant_trig_modes(g, k_max);
    // Count modes per frequency and compare with the harmonic projector rank.
    for (int k = 1; k <= k_max; ++k) {
      int count = 0;
      for (const auto& m : modes)
        if (m.k == k) ++count;
      CHECK(count == lpmk::invariant_dimension(1, k, g).dimension);
    }
    // Each listed mode really is invariant: evaluate through one generator.
    for (const auto& m : modes) {
      CHECK(std::abs(m.c * m.c + m.s * m.s - 1.0) <= 1e-12);
      for (double theta : {0.3, 1.1, 4.9}) {
        const double X[2] = {std::cos(theta), std::sin(theta)};
        double gx[2];
        g.element(1).apply(1, X, gx);
        const double t2 = std::atan2(gx[1], gx[0]);
        const double v1 = m.c * std::cos(m.k * theta) + m.s * std::sin(m.k * theta);
        const double v2 = m.c * std::cos(m.k * t2) + m.s * std::sin(m.k * t2);
        CHECK(std::abs(v1 - v2) <= 1e-10);
      }
    }
  }
}

TEST_CASE("first invariant frequency for the triangle group is three") {
  const lpmk::SymmetryGroup g = lpmk::build_group(lpmk::simplex_vertices(1), false);
  const std::vector<lpmk::TrigMode> modes = lpmk::invariant_trig_modes(g, 8);
  REQUIRE(!modes.empty());
  CHECK(modes.front().k == 3);
  // Frequencies are multiples of three for the full triangle group.
  for (const auto& m : modes) CHECK(m.k % 3 == 0);
}
