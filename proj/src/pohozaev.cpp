#include "lpmk/pohozaev.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lpmk/parallel.hpp"

namespace lpmk {

namespace {

void check_dimension(int n) {
  if (n != 1 && n != 2) {
    throw std::invalid_argument("projective field: n must be 1 or 2");
  }
}

/// Uniform double in [-1, 1) built from the top 53 bits of the engine output,
/// so the stream is identical on every platform.
double draw_unit(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

}  // namespace

void validate_projective_field(const ProjectiveField& pf) {
  check_dimension(pf.n);
  constexpr double kTol = 1e-14;
  if (pf.n == 1) {
    if (std::abs(pf.a[0]) > kTol) {
      throw std::invalid_argument("projective field: the 1x1 block A must be zero (trace-free)");
    }
  } else {
    if (std::abs(pf.a[0] + pf.a[3]) > kTol) {
      throw std::invalid_argument("projective field: A must be trace-free");
    }
    if (std::abs(pf.a[1] - pf.a[2]) > kTol) {
      throw std::invalid_argument("projective field: A must be symmetric");
    }
  }
}

std::array<double, 9> lambda_matrix(const ProjectiveField& pf) {
  validate_projective_field(pf);
  const int m = pf.n + 1;
  std::array<double, 9> lam{};
  for (int i = 0; i < pf.n; ++i) {
    for (int j = 0; j < pf.n; ++j) lam[static_cast<std::size_t>(i * m + j)] = pf.a[static_cast<std::size_t>(i * pf.n + j)];
    lam[static_cast<std::size_t>(i * m + pf.n)] = pf.b[static_cast<std::size_t>(i)];
    lam[static_cast<std::size_t>(pf.n * m + i)] = pf.c[static_cast<std::size_t>(i)];
  }
  lam[static_cast<std::size_t>(pf.n * m + pf.n)] = pf.d;
  return lam;
}

ProjectiveField random_projective_field(int n, std::uint64_t seed) {
  check_dimension(n);
  std::mt19937_64 rng(seed);
  ProjectiveField pf;
  pf.n = n;
  if (n == 2) {
    double raw[4];
    for (double& r : raw) r = draw_unit(rng);
    const double off = 0.5 * (raw[1] + raw[2]);
    const double tr = 0.5 * (raw[0] + raw[3]);
    pf.a = {raw[0] - tr, off, off, raw[3] - tr};
  }
  for (int i = 0; i < n; ++i) pf.b[static_cast<std::size_t>(i)] = draw_unit(rng);
  for (int i = 0; i < n; ++i) pf.c[static_cast<std::size_t>(i)] = draw_unit(rng);
  pf.d = draw_unit(rng);
  return pf;
}

void field_on_sphere(const ProjectiveField& pf, const double* X, double* out) {
  const auto lam = lambda_matrix(pf);
  const int m = pf.n + 1;
  double lx[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += lam[static_cast<std::size_t>(i * m + j)] * X[j];
    lx[i] = acc;
  }
  double q = 0.0;
  for (int i = 0; i < m; ++i) q += X[i] * lx[i];
  for (int i = 0; i < m; ++i) out[i] = lx[i] - q * X[i];
}

void chart_field(const ProjectiveField& pf, const ChartPoint& cp, double* out) {
  validate_projective_field(pf);
  if (cp.n != pf.n) throw std::invalid_argument("chart_field: dimension mismatch");
  // South chart: xi = (C.x) x + (A - D I) x - B. The mirror field on the
  // north chart negates B and C, which is exactly the sign pattern that makes
  // the two pullbacks agree across the equator.
  const double sgn = (cp.hemisphere > 0) ? -1.0 : 1.0;
  double cx = 0.0;
  for (int i = 0; i < pf.n; ++i) cx += pf.c[static_cast<std::size_t>(i)] * cp.x[static_cast<std::size_t>(i)];
  double xi[2];
  for (int i = 0; i < pf.n; ++i) {
    double ax = 0.0;
    for (int j = 0; j < pf.n; ++j) {
      ax += pf.a[static_cast<std::size_t>(i * pf.n + j)] * cp.x[static_cast<std::size_t>(j)];
    }
    xi[i] = sgn * cx * cp.x[static_cast<std::size_t>(i)] + ax - pf.d * cp.x[static_cast<std::size_t>(i)] -
            sgn * pf.b[static_cast<std::size_t>(i)];
  }
  pullback_vector(cp, xi, out);
}

double chart_sigma(const ProjectiveField& pf, const double* x) {
  validate_projective_field(pf);
  double cx = 0.0;
  for (int i = 0; i < pf.n; ++i) cx += pf.c[static_cast<std::size_t>(i)] * x[i];
  return cx - static_cast<double>(pf.n) * pf.d / static_cast<double>(pf.n + 1);
}

double beta_weight(const ProjectiveField& pf, const double* X, double p) {
  const auto lam = lambda_matrix(pf);
  const int m = pf.n + 1;
  double trace = 0.0;
  for (int i = 0; i < m; ++i) trace += lam[static_cast<std::size_t>(i * m + i)];
  double quad = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) quad += X[i] * lam[static_cast<std::size_t>(i * m + j)] * X[j];
  }
  const double gamma = (p + pf.n + 1) / static_cast<double>(pf.n + 1);
  return gamma * (trace - static_cast<double>(m) * quad);
}

double identity_integral(const SphereFunction& f, const SupportFunction& h, double p,
                         const ProjectiveField& pf, const SphereGrid& grid, int workers) {
  validate_projective_field(pf);
  if (f.n() != grid.n() || h.n() != grid.n() || pf.n != grid.n()) {
    throw std::invalid_argument("identity_integral: dimension mismatch");
  }
  const int m = grid.n() + 1;
  std::vector<double> terms(grid.size());
  std::vector<double> hvals(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    const double* X = grid.node(i);
    double xi[3] = {0.0, 0.0, 0.0};
    field_on_sphere(pf, X, xi);
    double grad[3] = {0.0, 0.0, 0.0};
    f.gradient(X, grad);
    double dxif = 0.0;
    for (int k = 0; k < m; ++k) dxif += grad[k] * xi[k];
    const double hv = h.value(X);
    hvals[i] = hv;
    const double beta = beta_weight(pf, X, p);
    terms[i] = grid.weight(i) * (dxif + beta * f.value(X)) * std::pow(hv, p);
  });
  for (std::size_t i = 0; i < hvals.size(); ++i) {
    if (!(hvals[i] > 0.0)) {
      std::ostringstream msg;
      msg << "identity_integral: h is not positive at node " << i << " (h = " << hvals[i] << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  return pairwise_sum(terms.data(), terms.size());
}

}  // namespace lpmk
