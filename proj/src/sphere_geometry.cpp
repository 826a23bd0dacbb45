#include "lpmk/sphere_geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lpmk {
namespace {

constexpr double kPi = std::numbers::pi;

/// Legendre polynomial value and derivative at t via the three-term
/// recurrence; used for Gauss-Legendre node construction.
void legendre_pair(int m, double t, double& p, double& dp) {
  double p0 = 1.0, p1 = t;
  if (m == 0) {
    p = p0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= m; ++k) {
    const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = m * (t * p1 - p0) / (t * t - 1.0);
}

/// Gauss-Legendre nodes/weights on [-1, 1] for even m, built from the
/// positive half and mirrored so that +-t pairs agree bit-for-bit.
void gauss_legendre(int m, std::vector<double>& t, std::vector<double>& w) {
  t.assign(m, 0.0);
  w.assign(m, 0.0);
  for (int i = 0; i < m / 2; ++i) {
    // Tricomi-style initial guess for the i-th root counted from +1.
    double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      legendre_pair(m, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre_pair(m, x, p, dp);
    const double weight = 2.0 / ((1.0 - x * x) * dp * dp);
    t[m - 1 - i] = x;
    t[i] = -x;
    w[m - 1 - i] = weight;
    w[i] = weight;
  }
}

}  // namespace

double sphere_area(int n) {
  if (n == 1) return 2.0 * kPi;
  if (n == 2) return 4.0 * kPi;
  throw std::invalid_argument("sphere_area: n must be 1 or 2");
}

SphereGrid::SphereGrid(int n, int resolution) : n_(n), resolution_(resolution) {
  if (n != 1 && n != 2)
    throw std::invalid_argument("SphereGrid: n must be 1 or 2, got " + std::to_string(n));
  if (resolution < 8)
    throw std::invalid_argument("SphereGrid: resolution must be >= 8, got " +
                                std::to_string(resolution));
  if (resolution % 2 != 0)
    throw std::invalid_argument(
        "SphereGrid: resolution must be even (odd counts place nodes on the equator)");

  if (n == 1) {
    const int N = resolution;
    nodes_.resize(2 * N);
    weights_.assign(N, 2.0 * kPi / N);
    hemisphere_.resize(N);
    for (int k = 0; k < N / 2; ++k) {
      const double theta = 2.0 * kPi * (k + 0.5) / N;
      const double c = std::cos(theta);
      const double s = std::sin(theta);  // > 0 on this half
      nodes_[2 * k] = c;
      nodes_[2 * k + 1] = s;
      hemisphere_[k] = +1;
      const int km = N - 1 - k;  // theta -> 2*pi - theta
      nodes_[2 * km] = c;
      nodes_[2 * km + 1] = -s;
      hemisphere_[km] = -1;
    }
    return;
  }

  const int nt = resolution;
  const int nphi = 2 * resolution;
  std::vector<double> t, wt;
  gauss_legendre(nt, t, wt);
  const std::size_t count = static_cast<std::size_t>(nt) * nphi;
  nodes_.resize(3 * count);
  weights_.resize(count);
  hemisphere_.resize(count);
  std::vector<double> cphi(nphi), sphi(nphi);
  for (int j = 0; j < nphi / 2; ++j) {
    const double phi = 2.0 * kPi * (j + 0.5) / nphi;
    cphi[j] = std::cos(phi);
    sphi[j] = std::sin(phi);
    cphi[nphi - 1 - j] = cphi[j];  // phi -> 2*pi - phi
    sphi[nphi - 1 - j] = -sphi[j];
  }
  const double wphi = 2.0 * kPi / nphi;
  std::size_t idx = 0;
  for (int i = 0; i < nt; ++i) {
    const double st = std::sqrt((1.0 - t[i]) * (1.0 + t[i]));
    for (int j = 0; j < nphi; ++j, ++idx) {
      nodes_[3 * idx] = st * cphi[j];
      nodes_[3 * idx + 1] = st * sphi[j];
      nodes_[3 * idx + 2] = t[i];
      weights_[idx] = wt[i] * wphi;
      hemisphere_[idx] = t[i] > 0.0 ? +1 : -1;
    }
  }
}

double SphereGrid::alpha() const { return sphere_area(n_); }

ChartPoint project_south(int n, const double* X) {
  const double last = X[n];
  if (!(last < 0.0))
    throw std::invalid_argument("project_south: point not on the south hemisphere");
  ChartPoint cp;
  cp.n = n;
  cp.hemisphere = -1;
  for (int v = 0; v < n; ++v) cp.x[v] = -X[v] / last;
  cp.s = -1.0 / last;
  return cp;
}

ChartPoint project_point(int n, const double* X) {
  const double last = X[n];
  if (last == 0.0) throw std::invalid_argument("project_point: point on the equator");
  if (last < 0.0) return project_south(n, X);
  ChartPoint cp;
  cp.n = n;
  cp.hemisphere = +1;
  for (int v = 0; v < n; ++v) cp.x[v] = X[v] / last;
  cp.s = 1.0 / last;
  return cp;
}

void lift_point(const ChartPoint& cp, double* X) {
  for (int v = 0; v < cp.n; ++v) X[v] = cp.x[v] / cp.s;
  X[cp.n] = static_cast<double>(cp.hemisphere) / cp.s;
}

void pullback_vector(int n, const double* x, const double* xi, double* out) {
  double m2 = 0.0;
  for (int v = 0; v < n; ++v) m2 += x[v] * x[v];
  const double m = std::sqrt(m2);
  if (m < 1e-14) {
    for (int v = 0; v < n; ++v) out[v] = xi[v];
    out[n] = 0.0;
    return;
  }
  // Scaled form: with u = x/m, mu = 1/m,
  //   first block = (mu^2 xi + xi_perp) * mu / (1+mu^2)^{3/2},
  //   last        = (u.xi) * mu^2 / (1+mu^2)^{3/2},
  // where xi_perp = xi - u (u.xi). Equals the textbook formula exactly and
  // stays finite for |x| up to overflow range.
  const double mu = 1.0 / m;
  const double mu2 = mu * mu;
  double udotxi = 0.0;
  for (int v = 0; v < n; ++v) udotxi += (x[v] * mu) * xi[v];
  const double denom = std::pow(1.0 + mu2, 1.5);
  for (int v = 0; v < n; ++v) {
    const double u = x[v] * mu;
    const double perp = xi[v] - u * udotxi;
    out[v] = (mu2 * xi[v] + perp) * mu / denom;
  }
  out[n] = udotxi * mu2 / denom;
}

void pullback_vector(const ChartPoint& cp, const double* xi, double* out) {
  pullback_vector(cp.n, cp.x, xi, out);
  if (cp.hemisphere > 0) out[cp.n] = -out[cp.n];
}

void push_to_chart(const ChartPoint& cp, const double* eta, double* xi) {
  // South: xi_k = s*(eta_k + x_k eta_{n+1}); north: xi_k = s*(eta_k - x_k eta_{n+1}).
  const double sign = cp.hemisphere < 0 ? 1.0 : -1.0;
  for (int v = 0; v < cp.n; ++v)
    xi[v] = cp.s * (eta[v] + sign * cp.x[v] * eta[cp.n]);
}

void chart_metric_inv_sqrt(const ChartPoint& cp, double* g) {
  const double f = cp.s / (1.0 + cp.s);
  if (cp.n == 1) {
    g[0] = cp.s + f * cp.x[0] * cp.x[0];
    return;
  }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      g[2 * a + b] = cp.s * ((a == b ? 1.0 : 0.0)) + f * cp.x[a] * cp.x[b];
}

void tangent_frame(const ChartPoint& cp, double* f1, double* f2) {
  double g[4];
  chart_metric_inv_sqrt(cp, g);
  if (cp.n == 1) {
    const double xi = g[0];
    pullback_vector(cp, &xi, f1);
    return;
  }
  const double col1[2] = {g[0], g[2]};
  const double col2[2] = {g[1], g[3]};
  pullback_vector(cp, col1, f1);
  pullback_vector(cp, col2, f2);
}

double chart_measure_factor(const ChartPoint& cp) {
  return std::pow(cp.s, -(cp.n + 1));
}

}  // namespace lpmk
