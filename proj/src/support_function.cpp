#include "lpmk/support_function.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "lpmk/parallel.hpp"

namespace lpmk {
namespace {

constexpr double kPi = std::numbers::pi;

void check_finite(const std::vector<double>& c, const char* who) {
  for (double v : c)
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": non-finite coefficient");
}

/// Orthogonality check for rotation matrices supplied by callers.
void check_orthogonal(const std::vector<std::vector<double>>& r, int d) {
  if (static_cast<int>(r.size()) != d)
    throw std::invalid_argument("rotated: matrix dimension mismatch");
  for (const auto& row : r)
    if (static_cast<int>(row.size()) != d)
      throw std::invalid_argument("rotated: matrix dimension mismatch");
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double dot = 0.0;
      for (int k = 0; k < d; ++k) dot += r[k][i] * r[k][j];
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-12)
        throw std::invalid_argument("rotated: matrix is not orthogonal");
    }
}

}  // namespace

PolynomialFunction::PolynomialFunction(Poly<double> p) : p_(std::move(p)) {
  if (p_.dim() < 2) throw std::invalid_argument("PolynomialFunction: need an ambient polynomial");
  for (int v = 0; v < p_.dim(); ++v) dp_[v] = p_.derivative(v);
}

double PolynomialFunction::value(const double* X) const {
  std::array<double, 3> pt{0.0, 0.0, 0.0};
  for (int v = 0; v < p_.dim(); ++v) pt[v] = X[v];
  return p_.eval(pt);
}

void PolynomialFunction::gradient(const double* X, double* out) const {
  const int dim = p_.dim();
  std::array<double, 3> pt{0.0, 0.0, 0.0};
  for (int v = 0; v < dim; ++v) pt[v] = X[v];
  double radial = 0.0;
  for (int v = 0; v < dim; ++v) {
    out[v] = dp_[v].eval(pt);
    radial += X[v] * out[v];
  }
  for (int v = 0; v < dim; ++v) out[v] -= radial * X[v];
}

double FrameHessian::det() const { return n == 1 ? w[0] : w[0] * w[3] - w[1] * w[2]; }

double FrameHessian::trace() const { return n == 1 ? w[0] : w[0] + w[3]; }

double FrameHessian::min_eigenvalue() const {
  if (n == 1) return w[0];
  const double mid = 0.5 * (w[0] + w[3]);
  const double rad = std::hypot(0.5 * (w[0] - w[3]), 0.5 * (w[1] + w[2]));
  return mid - rad;
}

std::array<double, 4> FrameHessian::cofactor() const {
  if (n == 1) return {1.0, 0.0, 0.0, 0.0};
  return {w[3], -w[2], -w[1], w[0]};
}

ChartExpansion::ChartExpansion(const std::vector<std::pair<int, Poly<double>>>& parts) {
  for (const auto& [deg, poly] : parts) {
    if (deg < 0 || poly.dim() != 3)
      throw std::invalid_argument("ChartExpansion: parts must be polynomials in 3 variables");
    if (!poly.is_zero() && (!poly.is_homogeneous() || poly.degree() != deg))
      throw std::invalid_argument("ChartExpansion: parts must be homogeneous of the tagged degree");
    lmax_ = std::max(lmax_, deg);
  }
  for (Side* sd : {&south_, &north_}) {
    const double last = (sd == &south_) ? -1.0 : 1.0;
    for (int l = 0; l <= lmax_; ++l) sd->q.emplace_back(2, l);
    for (const auto& [deg, poly] : parts) {
      const Poly<double> sub = poly.substitute_last(last);
      sub.for_each_term([&](const Exponent& e, const double& c) { sd->q[deg].add_term(e, c); });
    }
    for (int l = 0; l <= lmax_; ++l) {
      sd->q1.push_back(sd->q[l].derivative(0));
      sd->q2.push_back(sd->q[l].derivative(1));
      sd->q11.push_back(sd->q1[l].derivative(0));
      sd->q12.push_back(sd->q1[l].derivative(1));
      sd->q22.push_back(sd->q2[l].derivative(1));
    }
  }
}

double ChartExpansion::value(const ChartPoint& cp) const {
  const Side& sd = side(cp.hemisphere);
  const std::array<double, 3> y{cp.x[0], cp.x[1], 0.0};
  const double inv = 1.0 / cp.s;
  double pw = 1.0;  // s^{-l}
  double h = 0.0;
  for (int l = 0; l <= lmax_; ++l) {
    h += pw * sd.q[l].eval(y);
    pw *= inv;
  }
  return h;
}

void ChartExpansion::chart_hessian(const ChartPoint& cp, double* d2v) const {
  const Side& sd = side(cp.hemisphere);
  const std::array<double, 3> y{cp.x[0], cp.x[1], 0.0};
  const double s = cp.s;
  const double inv = 1.0 / s;
  const double inv2 = inv * inv;
  double v11 = 0.0, v12 = 0.0, v22 = 0.0;
  double sa = s;  // s^{1-l}
  for (int l = 0; l <= lmax_; ++l) {
    const double a = 1.0 - l;
    const double qv = sd.q[l].eval(y);
    const double q1 = sd.q1[l].eval(y);
    const double q2 = sd.q2[l].eval(y);
    const double sb = sa * inv2;        // s^{a-2}
    const double sc = sb * inv2;        // s^{a-4}
    const double diag = a * sb;
    const double quad = a * (a - 2.0) * sc;
    v11 += sa * sd.q11[l].eval(y) + diag * (2.0 * q1 * y[0] + qv) + quad * qv * y[0] * y[0];
    v22 += sa * sd.q22[l].eval(y) + diag * (2.0 * q2 * y[1] + qv) + quad * qv * y[1] * y[1];
    v12 += sa * sd.q12[l].eval(y) + diag * (q1 * y[1] + q2 * y[0]) + quad * qv * y[0] * y[1];
    sa *= inv;
  }
  d2v[0] = v11;
  d2v[1] = v12;
  d2v[2] = v12;
  d2v[3] = v22;
}

FrameHessian ChartExpansion::hessian(const ChartPoint& cp) const {
  double d2v[4];
  chart_hessian(cp, d2v);
  // W = s T (D^2 v) T, T = I + x x^T/(1+s): exactly c I for h == c.
  const double f = 1.0 / (1.0 + cp.s);
  const double t11 = 1.0 + cp.x[0] * cp.x[0] * f;
  const double t12 = cp.x[0] * cp.x[1] * f;
  const double t22 = 1.0 + cp.x[1] * cp.x[1] * f;
  const double m11 = t11 * d2v[0] + t12 * d2v[1];
  const double m12 = t11 * d2v[1] + t12 * d2v[3];
  const double m21 = t12 * d2v[0] + t22 * d2v[1];
  const double m22 = t12 * d2v[1] + t22 * d2v[3];
  FrameHessian fh;
  fh.n = 2;
  fh.w[0] = cp.s * (m11 * t11 + m12 * t12);
  fh.w[1] = cp.s * (m11 * t12 + m12 * t22);
  fh.w[2] = cp.s * (m21 * t11 + m22 * t12);
  fh.w[3] = cp.s * (m21 * t12 + m22 * t22);
  double f1[3], f2[3], X[3];
  tangent_frame(cp, f1, f2);
  lift_point(cp, X);
  for (int v = 0; v < 3; ++v) {
    fh.frame1[v] = f1[v];
    fh.frame2[v] = f2[v];
    fh.point[v] = X[v];
  }
  return fh;
}

SupportFunction SupportFunction::fourier(std::vector<double> coeffs) {
  if (coeffs.empty() || coeffs.size() % 2 == 0)
    throw std::invalid_argument("SupportFunction::fourier: need coefficients [a0, a1, b1, ...]");
  check_finite(coeffs, "SupportFunction::fourier");
  SupportFunction h;
  h.n_ = 1;
  h.coeffs_ = std::move(coeffs);
  return h;
}

SupportFunction SupportFunction::spectral(std::shared_ptr<const HarmonicBasis> basis,
                                          std::vector<double> coeffs) {
  if (!basis) throw std::invalid_argument("SupportFunction::spectral: null basis");
  if (basis->n() != 2)
    throw std::invalid_argument("SupportFunction::spectral: basis must live on S^2");
  if (coeffs.size() != basis->total_dimension())
    throw std::invalid_argument("SupportFunction::spectral: coefficient count mismatch");
  check_finite(coeffs, "SupportFunction::spectral");
  SupportFunction h;
  h.n_ = 2;
  h.basis_ = std::move(basis);
  h.coeffs_ = std::move(coeffs);
  std::vector<std::pair<int, Poly<double>>> parts;
  std::size_t at = 0;
  for (int mu = 0; mu <= h.basis_->max_degree(); ++mu) {
    Poly<double> part(3, mu);
    for (const Poly<double>& b : h.basis_->degree(mu)) {
      const double c = h.coeffs_[at++];
      if (c != 0.0)
        b.for_each_term([&](const Exponent& e, const double& v) { part.add_term(e, c * v); });
    }
    parts.emplace_back(mu, std::move(part));
  }
  h.chart_ = std::make_shared<ChartExpansion>(parts);
  return h;
}

SupportFunction SupportFunction::constant(int n, double value) {
  if (n == 1) return fourier({value});
  if (n == 2) {
    auto basis = std::make_shared<HarmonicBasis>(2, 0);
    return spectral(basis, {value * std::sqrt(sphere_area(2))});
  }
  throw std::invalid_argument("SupportFunction::constant: n must be 1 or 2");
}

SupportFunction SupportFunction::ellipse(double a, double b, int L) {
  if (a <= 0.0 || b <= 0.0)
    throw std::invalid_argument("SupportFunction::ellipse: semi-axes must be positive");
  if (L < 1) throw std::invalid_argument("SupportFunction::ellipse: need L >= 1");
  // The projection runs in extended precision: high modes of an ellipse sit
  // far below double rounding noise, and any noise left in coefficient k is
  // amplified by k^2 when the Hessian is assembled (visible as quadrature
  // aliasing on grids with fewer than 2L nodes).
  const int N = std::max(4 * L, 512);
  const long double pi_l = 3.14159265358979323846264338327950288L;
  std::vector<long double> h(N);
  for (int j = 0; j < N; ++j) {
    const long double th = 2.0L * pi_l * (j + 0.5L) / N;
    const long double c = std::cos(th), s = std::sin(th);
    h[j] = std::sqrt((long double)a * a * c * c + (long double)b * b * s * s);
  }
  std::vector<double> coeffs(2 * L + 1, 0.0);
  long double mean = 0.0L;
  for (int j = 0; j < N; ++j) mean += h[j];
  coeffs[0] = static_cast<double>(mean / N);
  for (int k = 1; k <= L; ++k) {
    long double ak = 0.0L, bk = 0.0L;
    for (int j = 0; j < N; ++j) {
      const long double th = 2.0L * pi_l * (j + 0.5L) / N;
      ak += h[j] * std::cos(k * th);
      bk += h[j] * std::sin(k * th);
    }
    coeffs[2 * k - 1] = static_cast<double>(2.0L * ak / N);
    coeffs[2 * k] = static_cast<double>(2.0L * bk / N);
  }
  return fourier(std::move(coeffs));
}

int SupportFunction::degree_cutoff() const {
  if (n_ == 1) return static_cast<int>((coeffs_.size() - 1) / 2);
  return basis_->max_degree();
}

double SupportFunction::value_angle(double theta) const {
  if (n_ != 1) throw std::invalid_argument("value_angle: only available for n=1");
  double h = coeffs_[0];
  const int L = degree_cutoff();
  for (int k = 1; k <= L; ++k)
    h += coeffs_[2 * k - 1] * std::cos(k * theta) + coeffs_[2 * k] * std::sin(k * theta);
  return h;
}

double SupportFunction::det_w_angle(double theta) const {
  if (n_ != 1) throw std::invalid_argument("det_w_angle: only available for n=1");
  double d = coeffs_[0];
  const int L = degree_cutoff();
  for (int k = 1; k <= L; ++k) {
    const double g = 1.0 - static_cast<double>(k) * k;
    d += g * (coeffs_[2 * k - 1] * std::cos(k * theta) + coeffs_[2 * k] * std::sin(k * theta));
  }
  return d;
}

double SupportFunction::value(const double* X) const {
  if (n_ == 1) return value_angle(std::atan2(X[1], X[0]));
  double h = 0.0;
  std::size_t at = 0;
  for (int mu = 0; mu <= basis_->max_degree(); ++mu)
    for (const Poly<double>& b : basis_->degree(mu)) h += coeffs_[at++] * eval_on_sphere(b, X);
  return h;
}

double SupportFunction::chart_value(const ChartPoint& cp) const {
  if (n_ != 1 && cp.n != n_) throw std::invalid_argument("chart_value: dimension mismatch");
  if (n_ == 1) throw std::invalid_argument("chart_value: n=1 evaluates trigonometrically");
  return chart_->value(cp);
}

FrameHessian SupportFunction::hessian_frame(const double* X) const {
  if (n_ == 1) {
    const double theta = std::atan2(X[1], X[0]);
    FrameHessian fh;
    fh.n = 1;
    fh.w[0] = det_w_angle(theta);
    fh.frame1 = {-std::sin(theta), std::cos(theta), 0.0};
    fh.point = {std::cos(theta), std::sin(theta), 0.0};
    return fh;
  }
  return chart_->hessian(project_point(2, X));
}

SupportFunction SupportFunction::rotated(const std::vector<std::vector<double>>& r) const {
  check_orthogonal(r, n_ + 1);
  if (n_ == 1) {
    const double det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
    const bool proper = det > 0.0;
    const double alpha = proper ? std::atan2(r[1][0], r[0][0]) : std::atan2(r[0][1], r[0][0]);
    std::vector<double> c(coeffs_.size());
    c[0] = coeffs_[0];
    const int L = degree_cutoff();
    for (int k = 1; k <= L; ++k) {
      const double ck = std::cos(k * alpha), sk = std::sin(k * alpha);
      const double ak = coeffs_[2 * k - 1], bk = coeffs_[2 * k];
      c[2 * k - 1] = ak * ck + bk * sk;
      c[2 * k] = proper ? (bk * ck - ak * sk) : (ak * sk - bk * ck);
    }
    return fourier(std::move(c));
  }
  std::vector<double> c(coeffs_.size());
  std::size_t at = 0;
  for (int mu = 0; mu <= basis_->max_degree(); ++mu) {
    const int dim_mu = basis_->dimension(mu);
    const Eigen::MatrixXd t = substitution_block_matrix(*basis_, mu, r);
    Eigen::VectorXd block(dim_mu);
    for (int i = 0; i < dim_mu; ++i) block(i) = coeffs_[at + i];
    const Eigen::VectorXd mapped = t * block;
    for (int i = 0; i < dim_mu; ++i) c[at + i] = mapped(i);
    at += dim_mu;
  }
  return spectral(basis_, std::move(c));
}

SupportFunction SupportFunction::scaled(double c) const {
  if (!std::isfinite(c)) throw std::invalid_argument("scaled: non-finite factor");
  std::vector<double> out = coeffs_;
  for (double& v : out) v *= c;
  if (n_ == 1) return fourier(std::move(out));
  return spectral(basis_, std::move(out));
}

ConvexityReport convexity_certificate(const SupportFunction& h, const SphereGrid& grid,
                                      int workers) {
  if (h.n() != grid.n()) throw std::invalid_argument("convexity_certificate: dimension mismatch");
  const std::size_t N = grid.size();
  std::vector<double> eig(N);
  parallel_for(N, workers,
               [&](std::size_t i) { eig[i] = h.hessian_frame(grid.node(i)).min_eigenvalue(); });
  ConvexityReport rep;
  rep.min_eigenvalue = eig[0];
  rep.worst_node = 0;
  for (std::size_t i = 1; i < N; ++i)
    if (eig[i] < rep.min_eigenvalue) {
      rep.min_eigenvalue = eig[i];
      rep.worst_node = i;
    }
  rep.ok = rep.min_eigenvalue >= -1e-10;
  return rep;
}

double volume(const SupportFunction& h, const SphereGrid& grid, int workers) {
  if (h.n() != grid.n()) throw std::invalid_argument("volume: dimension mismatch");
  const std::size_t N = grid.size();
  std::vector<double> term(N), eig(N);
  parallel_for(N, workers, [&](std::size_t i) {
    const FrameHessian fh = h.hessian_frame(grid.node(i));
    eig[i] = fh.min_eigenvalue();
    term[i] = grid.weight(i) * h.value(grid.node(i)) * fh.det();
  });
  double worst = eig[0];
  std::size_t at = 0;
  for (std::size_t i = 1; i < N; ++i)
    if (eig[i] < worst) {
      worst = eig[i];
      at = i;
    }
  if (worst < -1e-10) {
    const double* X = grid.node(at);
    std::ostringstream msg;
    msg << "volume: convexity certificate failed at node " << at << " (X = " << X[0] << ", "
        << X[1];
    if (grid.n() == 2) msg << ", " << X[2];
    msg << "), min W-eigenvalue " << worst;
    throw std::invalid_argument(msg.str());
  }
  return pairwise_sum(term) / (grid.n() + 1);
}

double lp_integral(const SupportFunction& h, double p, const SphereGrid& grid, int workers) {
  if (h.n() != grid.n()) throw std::invalid_argument("lp_integral: dimension mismatch");
  const std::size_t N = grid.size();
  std::vector<double> vals(N);
  parallel_for(N, workers, [&](std::size_t i) { vals[i] = h.value(grid.node(i)); });
  for (std::size_t i = 0; i < N; ++i)
    if (!(vals[i] > 0.0)) {
      std::ostringstream msg;
      msg << "lp_integral: non-positive value " << vals[i] << " at node " << i;
      throw std::invalid_argument(msg.str());
    }
  std::vector<double> term(N);
  parallel_for(N, workers,
               [&](std::size_t i) { term[i] = grid.weight(i) * std::pow(vals[i], p); });
  return pairwise_sum(term);
}

double ma_residual(const SupportFunction& h, const SphereFunction& f, double p,
                   const SphereGrid& grid, int workers) {
  if (h.n() != grid.n() || f.n() != grid.n())
    throw std::invalid_argument("ma_residual: dimension mismatch");
  const std::size_t N = grid.size();
  return max_terms(N, workers, [&](std::size_t i) {
    const double* X = grid.node(i);
    const double rhs = f.value(X) * std::pow(h.value(X), p - 1.0);
    return std::abs(h.hessian_frame(X).det() - rhs) / (1.0 + std::abs(rhs));
  });
}

}  // namespace lpmk
