#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "lpmk/poly.hpp"
#include "lpmk/spectral.hpp"
#include "lpmk/sphere_function.hpp"
#include "lpmk/sphere_geometry.hpp"

/// Support functions h on S^n and their Monge-Ampere data: the matrix
/// W(h) = grad^2 h + h I in an orthonormal tangent frame, its determinant and
/// cofactors, mixed volume, and L_p integrals.
///
/// Representation: for n=1 a Fourier series evaluated trigonometrically
/// (monomial coefficients of cos/sin(k theta) grow like 2^k, so polynomial
/// evaluation is numerically unusable at high frequency); for n=2 a
/// coefficient vector over an orthonormal harmonic basis, differentiated
/// analytically through the hemisphere charts.
namespace lpmk {

/// W = grad^2 h + h I at one sphere point, in an orthonormal tangent frame.
struct FrameHessian {
  int n = 1;
  /// Row-major n x n entries.
  std::array<double, 4> w{0.0, 0.0, 0.0, 0.0};
  /// Orthonormal tangent frame vectors (n+1 ambient components each; only
  /// frame1 is meaningful for n=1).
  std::array<double, 3> frame1{0.0, 0.0, 0.0};
  std::array<double, 3> frame2{0.0, 0.0, 0.0};
  /// The evaluation point.
  std::array<double, 3> point{0.0, 0.0, 0.0};

  double det() const;
  double trace() const;
  double min_eigenvalue() const;
  /// Cofactor matrix U (dDet/dW entrywise): {1} for n=1.
  std::array<double, 4> cofactor() const;
};

/// Per-hemisphere chart representation of a sum of solid harmonics
/// sum_l P_l (P_l homogeneous of degree l in 3 variables): the collapsed
/// chart polynomials Q_l(y) = P_l(y, -+1) and their derivatives, giving
/// v(y) = sum_l s^{1-l} Q_l(y) with s = sqrt(1+|y|^2) and analytic first and
/// second chart derivatives of v. n=2 only.
class ChartExpansion {
 public:
  /// parts: (degree, solid polynomial) pairs; the represented function is the
  /// sum of their sphere restrictions.
  explicit ChartExpansion(const std::vector<std::pair<int, Poly<double>>>& parts);

  /// h at the chart point (v/s).
  double value(const ChartPoint& cp) const;
  /// Raw chart Hessian D^2 v (row-major 2x2, symmetric).
  void chart_hessian(const ChartPoint& cp, double* d2v) const;
  /// W in the chart-metric orthonormal frame: W = s T (D^2 v) T with
  /// T = I + x x^T/(1+s); satisfies det W = s^{n+2} det D^2 v.
  FrameHessian hessian(const ChartPoint& cp) const;

 private:
  struct Side {
    std::vector<Poly<double>> q, q1, q2, q11, q12, q22;
  };
  const Side& side(int hemisphere) const { return hemisphere < 0 ? south_ : north_; }

  int lmax_ = 0;
  Side south_;
  Side north_;
};

/// Immutable support function on S^n.
class SupportFunction {
 public:
  /// n=1 Fourier coefficients laid out [a_0, a_1, b_1, ..., a_L, b_L]
  /// (size 2L+1): h(theta) = a_0 + sum_k a_k cos k theta + b_k sin k theta.
  static SupportFunction fourier(std::vector<double> coeffs);
  /// n=2 coefficients over all degrees of an orthonormal harmonic basis,
  /// concatenated in degree order (size = basis->total_dimension()).
  static SupportFunction spectral(std::shared_ptr<const HarmonicBasis> basis,
                                  std::vector<double> coeffs);
  static SupportFunction constant(int n, double value);
  /// n=1 ellipse with semi-axes a, b: h = sqrt(a^2 cos^2 + b^2 sin^2),
  /// projected onto L Fourier modes (analytic, coefficients decay
  /// geometrically; L = 128 reaches truncation below 1e-13 for moderate
  /// aspect ratios).
  static SupportFunction ellipse(double a, double b, int L = 128);

  int n() const { return n_; }
  /// Spectral cutoff degree.
  int degree_cutoff() const;
  const std::vector<double>& coefficients() const { return coeffs_; }
  const std::shared_ptr<const HarmonicBasis>& basis() const { return basis_; }

  /// h(X) by direct basis summation.
  double value(const double* X) const;
  /// n=1 only: h(theta).
  double value_angle(double theta) const;
  /// h(X) through the hemisphere chart (n=2; cross-validates value()).
  double chart_value(const ChartPoint& cp) const;

  /// W at X. For n=2 this throws std::invalid_argument on the equator.
  FrameHessian hessian_frame(const double* X) const;
  /// n=1 only: det W = h'' + h at theta, evaluated trigonometrically.
  double det_w_angle(double theta) const;

  /// Composition with an orthogonal map: returns h(R .).
  SupportFunction rotated(const std::vector<std::vector<double>>& r) const;
  /// c * h.
  SupportFunction scaled(double c) const;

 private:
  SupportFunction() = default;

  int n_ = 1;
  std::vector<double> coeffs_;
  std::shared_ptr<const HarmonicBasis> basis_;   // n=2
  std::shared_ptr<const ChartExpansion> chart_;  // n=2
};

/// Smallest W-eigenvalue over the grid with its location.
struct ConvexityReport {
  double min_eigenvalue = 0.0;
  std::size_t worst_node = 0;
  bool ok = false;  // min eigenvalue >= -1e-10
};
ConvexityReport convexity_certificate(const SupportFunction& h, const SphereGrid& grid,
                                      int workers = 1);

/// V = (1/(n+1)) integral of h det W dsigma. Throws std::invalid_argument
/// with a worst-node diagnostic when the convexity certificate fails.
double volume(const SupportFunction& h, const SphereGrid& grid, int workers = 1);

/// Integral of h^p dsigma; requires h > 0 at every node.
double lp_integral(const SupportFunction& h, double p, const SphereGrid& grid, int workers = 1);

/// max over nodes of |det W - f h^{p-1}| / (1 + |f h^{p-1}|): zero exactly
/// when h solves det W = f h^{p-1} on the grid.
double ma_residual(const SupportFunction& h, const SphereFunction& f, double p,
                   const SphereGrid& grid, int workers = 1);

}  // namespace lpmk
