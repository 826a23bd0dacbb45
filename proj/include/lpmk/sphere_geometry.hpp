#pragma once

#include <cstdint>
#include <vector>

/// Quadrature grids on S^1/S^2 and the two gnomonic hemisphere charts,
/// including the chart differential acting on vector fields.
///
/// Conventions. The south chart covers X_{n+1} < 0 with coordinate
/// x = -X'/X_{n+1} and lift X = (x, -1)/s, s = sqrt(1+|x|^2) = -1/X_{n+1};
/// the north chart covers X_{n+1} > 0 with x = X'/X_{n+1}, X = (x, +1)/s.
/// Both grids place nodes strictly off the equator by construction, so chart
/// dispatch never hits the singular circle.
namespace lpmk {

/// |S^n|: 2*pi for n=1, 4*pi for n=2.
double sphere_area(int n);

/// Quadrature nodes, weights and per-node hemisphere tags.
///
/// n=1: midpoint circle rule, theta_k = 2*pi*(k+1/2)/N, weight 2*pi/N.
/// n=2: Gauss-Legendre in t = X_3 (resolution nodes, even) tensor a midpoint
/// longitude rule with 2*resolution points. Mirror-image nodes are built by
/// reflecting stored coordinates, so symmetric pairs agree bit-for-bit.
class SphereGrid {
 public:
  SphereGrid(int n, int resolution);

  int n() const { return n_; }
  int resolution() const { return resolution_; }
  std::size_t size() const { return weights_.size(); }
  const double* node(std::size_t i) const { return &nodes_[i * (n_ + 1)]; }
  double weight(std::size_t i) const { return weights_[i]; }
  /// +1 on the north hemisphere (X_{n+1} > 0), -1 on the south.
  int hemisphere(std::size_t i) const { return hemisphere_[i]; }
  double alpha() const;
  const std::vector<double>& weights() const { return weights_; }

 private:
  int n_;
  int resolution_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<std::int8_t> hemisphere_;
};

inline SphereGrid make_grid(int n, int resolution) { return SphereGrid(n, resolution); }

/// A sphere point expressed in its hemisphere's gnomonic chart.
struct ChartPoint {
  int n = 1;
  int hemisphere = -1;  // -1 south, +1 north
  double x[2] = {0.0, 0.0};
  double s = 1.0;  // sqrt(1 + |x|^2)
};

/// Project a south-hemisphere point (throws unless X_{n+1} < 0).
ChartPoint project_south(int n, const double* X);

/// Project into the chart of X's hemisphere (throws on the equator).
ChartPoint project_point(int n, const double* X);

/// Chart-to-sphere lift; writes n+1 components.
void lift_point(const ChartPoint& cp, double* X);

/// Differential of the south-chart lift applied to a chart vector xi at x:
/// T^*(xi) = ( xi/s - (x.xi) x/s^3, (x.xi)/s^3 ). Writes n+1 components.
/// Evaluated in a scaled form that stays finite and accurate for all |x|
/// (the naive formula overflows near the equator where |x| ~ 1e150+).
void pullback_vector(int n, const double* x, const double* xi, double* out);

/// Hemisphere-aware version: identical to pullback_vector on the south chart;
/// on the north chart the last ambient component flips sign.
void pullback_vector(const ChartPoint& cp, const double* xi, double* out);

/// Inverse direction: express an ambient tangent vector eta (n+1 components)
/// in chart coordinates at cp. Writes n components.
void push_to_chart(const ChartPoint& cp, const double* eta, double* xi);

/// Inverse square root of the chart metric: (G^{-1/2})_{ab} =
/// s*(delta_ab + x_a x_b/(1+s)); row-major n x n. Mapping the coordinate
/// basis through it yields an orthonormal tangent frame.
void chart_metric_inv_sqrt(const ChartPoint& cp, double* g);

/// Orthonormal ambient tangent frame at cp (each frame vector has n+1
/// components; only the first is written for n=1).
void tangent_frame(const ChartPoint& cp, double* f1, double* f2);

/// Chart measure factor: dsigma = s^{-(n+1)} dx.
double chart_measure_factor(const ChartPoint& cp);

}  // namespace lpmk
