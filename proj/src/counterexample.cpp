#include "lpmk/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lpmk/parallel.hpp"

namespace lpmk {

namespace {

constexpr double kLogRadiusMin = -13.815510557964274;  // ln 1e-6
constexpr double kLogRadiusMax = 13.815510557964274;   // ln 1e+6
constexpr int kTableIntervals = 1 << 18;

// 4-point Gauss-Legendre rule on [-1, 1]; one panel per table interval is
// far below round-off for the interval widths used here.
constexpr double kGl4Node[2] = {0.3399810435848563, 0.8611363115940526};
constexpr double kGl4Weight[2] = {0.6521451548625461, 0.3478548451374538};

// 8-point rule for the direct (non-tabulated) evaluation path.
constexpr double kGl8Node[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                0.9602898564975363};
constexpr double kGl8Weight[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                  0.1012285362903763};

/// log of G(r) = (1+r^2)^{(n+1)/2} / r^n at r = e^u.
double log_g(int n, double u) {
  return 0.5 * (n + 1) * std::log1p(std::exp(2.0 * u)) - n * u;
}

double phi_profile(double phi_inf, int k, double r) {
  const double rk = std::pow(r, k);
  if (!std::isfinite(rk)) return phi_inf;
  return phi_inf * rk / (1.0 + rk);
}

/// Integrand of the inner integral in log radius: phi(e^u) G(e^u)^{|gamma|}
/// (the 1/t of the radial measure cancels against dt = t du).
double inner_integrand(int n, double abs_gamma, double phi_inf, int k, double u) {
  return phi_profile(phi_inf, k, std::exp(u)) * std::exp(abs_gamma * log_g(n, u));
}

double gl4_panel(double a, double b, int n, double abs_gamma, double phi_inf, int k) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int j = 0; j < 2; ++j) {
    acc += kGl4Weight[j] * (inner_integrand(n, abs_gamma, phi_inf, k, mid + half * kGl4Node[j]) +
                            inner_integrand(n, abs_gamma, phi_inf, k, mid - half * kGl4Node[j]));
  }
  return half * acc;
}

/// Integrand (in log radius) of the tail-matching correction
/// int_1^inf [ (phi - phi_inf) + (n+1) phi_inf/(1+t^2) ] G^{|gamma|} du.
double matching_integrand(int n, double abs_gamma, double phi_inf, int k, double u) {
  const double t = std::exp(u);
  const double tk = std::pow(t, k);
  const double deficit = std::isfinite(tk) ? -phi_inf / (1.0 + tk) : 0.0;
  const double curvature = (n + 1) * phi_inf / (1.0 + t * t);
  return (deficit + curvature) * std::exp(abs_gamma * log_g(n, u));
}

double gl4_matching_panel(double a, double b, int n, double abs_gamma, double phi_inf, int k) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int j = 0; j < 2; ++j) {
    acc += kGl4Weight[j] * (matching_integrand(n, abs_gamma, phi_inf, k, mid + half * kGl4Node[j]) +
                            matching_integrand(n, abs_gamma, phi_inf, k, mid - half * kGl4Node[j]));
  }
  return half * acc;
}

/// Fritsch-Carlson monotone cubic slopes on a uniform grid.
std::vector<double> monotone_slopes(const std::vector<double>& f, double h) {
  const std::size_t m = f.size();
  std::vector<double> d(m, 0.0);
  if (m < 2) return d;
  std::vector<double> s(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) s[i] = (f[i + 1] - f[i]) / h;
  auto edge = [&](double s0, double s1) {
    double val = 1.5 * s0 - 0.5 * s1;
    if (val * s0 <= 0.0) return 0.0;
    if (s0 * s1 < 0.0 && std::abs(val) > 3.0 * std::abs(s0)) return 3.0 * s0;
    return val;
  };
  d[0] = edge(s[0], m > 2 ? s[1] : s[0]);
  d[m - 1] = edge(s[m - 2], m > 2 ? s[m - 3] : s[m - 2]);
  for (std::size_t i = 1; i + 1 < m; ++i) {
    if (s[i - 1] * s[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      d[i] = 2.0 * s[i - 1] * s[i] / (s[i - 1] + s[i]);
    }
  }
  return d;
}

}  // namespace

CriticalWeight::CriticalWeight(int n, double exponent, double offset)
    : n_(n), d_(exponent), c_(offset) {
  if (n != 1 && n != 2) throw std::invalid_argument("critical weight: n must be 1 or 2");
  if (!(exponent > 0.0)) throw std::invalid_argument("critical weight: the exponent D must be positive");
  if (!(offset > 0.0)) throw std::invalid_argument("critical weight: the offset C must be positive");
}

double CriticalWeight::value(const double* X) const {
  const double t = std::abs(X[n_]);
  return std::pow(t, d_) + c_;
}

void CriticalWeight::gradient(const double* X, double* out) const {
  const double t = X[n_];
  const double scale = d_ * std::copysign(std::pow(std::abs(t), d_ - 1.0), t);
  for (int i = 0; i <= n_; ++i) out[i] = -scale * t * X[i];
  out[n_] += scale;
}

ProjectiveField CriticalWeight::certification_field() const {
  ProjectiveField pf;
  pf.n = n_;
  pf.d = -d_;
  return pf;
}

CriticalWeight critical_f(int n, double exponent, double offset) {
  return CriticalWeight(n, exponent, offset);
}

double RadialWeightFunction::radial_value(double r) const {
  if (!(r >= 0.0)) throw std::invalid_argument("radial weight: radius must be nonnegative");
  if (r == 0.0) return 0.0;
  const double u = std::log(r);
  if (u <= u0_) return values_.front() * std::exp(pole_exponent_ * (u - u0_));
  const double umax = u0_ + du_ * static_cast<double>(values_.size() - 1);
  if (u >= umax) return values_.back();
  const double pos = (u - u0_) / du_;
  const std::size_t j = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
  const double t = pos - static_cast<double>(j);
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * values_[j] + h01 * values_[j + 1] + du_ * (h10 * slopes_[j] + h11 * slopes_[j + 1]);
}

double RadialWeightFunction::log_derivative(double r) const {
  if (!(r >= 0.0)) throw std::invalid_argument("radial weight: radius must be nonnegative");
  if (r == 0.0) return 0.0;
  const double u = std::log(r);
  if (u <= u0_) return pole_exponent_ * radial_value(r);
  const double umax = u0_ + du_ * static_cast<double>(values_.size() - 1);
  if (u >= umax) return 0.0;
  const double pos = (u - u0_) / du_;
  const std::size_t j = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
  const double t = pos - static_cast<double>(j);
  const double t2 = t * t;
  const double g00 = (6.0 * t2 - 6.0 * t) / du_;
  const double g01 = (-6.0 * t2 + 6.0 * t) / du_;
  const double g10 = 3.0 * t2 - 4.0 * t + 1.0;
  const double g11 = 3.0 * t2 - 2.0 * t;
  return g00 * values_[j] + g01 * values_[j + 1] + g10 * slopes_[j] + g11 * slopes_[j + 1];
}

double RadialWeightFunction::evaluate_exact(double r) const {
  if (!(r > 0.0)) throw std::invalid_argument("radial weight: radius must be positive");
  const double u = std::log(r);
  const double abs_gamma = -gamma_;
  const int panels = std::max(64, static_cast<int>(std::ceil(std::abs(u) / 0.01)));
  double acc = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = u * static_cast<double>(i) / panels;
    const double b = u * static_cast<double>(i + 1) / panels;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double panel = 0.0;
    for (int j = 0; j < 4; ++j) {
      panel += kGl8Weight[j] *
               (inner_integrand(n_, abs_gamma, phi_inf_, phi_k_, mid + half * kGl8Node[j]) +
                inner_integrand(n_, abs_gamma, phi_inf_, phi_k_, mid - half * kGl8Node[j]));
    }
    acc += half * panel;
  }
  return std::exp(gamma_ * log_g(n_, u)) * (acc + beta0_);
}

double RadialWeightFunction::phi(double r) const { return phi_profile(phi_inf_, phi_k_, r); }

double RadialWeightFunction::table_radius(std::size_t j) const {
  return std::exp(u0_ + du_ * static_cast<double>(j));
}

double RadialWeightFunction::value(const double* X) const {
  const double t = std::abs(X[n_]);
  const double a = (n_ == 1) ? std::abs(X[0]) : std::hypot(X[0], X[1]);
  if (t < 1e-300) return values_.back();
  return radial_value(a / t);
}

void RadialWeightFunction::gradient(const double* X, double* out) const {
  const double t = X[n_];
  const double at = std::abs(t);
  const double a = (n_ == 1) ? std::abs(X[0]) : std::hypot(X[0], X[1]);
  for (int i = 0; i <= n_; ++i) out[i] = 0.0;
  if (at < 1e-300) return;  // equator: beyond the table, f is constant
  const double r = a / at;
  if (r < 1e-300) return;  // pole
  const double umax = u0_ + du_ * static_cast<double>(values_.size() - 1);
  if (std::log(r) >= umax) return;
  const double g1 = log_derivative(r);
  // f(X) = F(t) with r^2 = 1/t^2 - 1, so F'(t) = -g1 / (r^2 t^3) and the
  // tangential gradient is F'(t) (e_{n+1} - t X).
  const double fp = -g1 / (r * r * t * t * t);
  for (int i = 0; i <= n_; ++i) out[i] = -fp * t * X[i];
  out[n_] += fp;
}

ProjectiveField RadialWeightFunction::certification_field() const {
  ProjectiveField pf;
  pf.n = n_;
  pf.d = 1.0;
  return pf;
}

RadialWeightFunction resolve_radial_f(const RadialWeight& w) {
  if (w.n != 1 && w.n != 2) throw std::invalid_argument("radial weight: n must be 1 or 2");
  if (!(w.p < -w.n - 1)) {
    throw std::invalid_argument("radial weight: requires p < -n-1 (negative gamma)");
  }
  if (!(w.phi_inf > 0.0)) throw std::invalid_argument("radial weight: phi_inf must be positive");
  const double gamma = (w.p + w.n + 1) / static_cast<double>(w.n + 1);
  const double abs_gamma = -gamma;
  const double pole_exponent = w.n * abs_gamma;
  int k = w.phi_k;
  if (k == 0) k = static_cast<int>(std::ceil(pole_exponent)) + 2;
  if (k < 0) throw std::invalid_argument("radial weight: decay power must be nonnegative");
  if (static_cast<double>(k) <= pole_exponent) {
    throw std::invalid_argument(
        "radial weight: phi decays too slowly; the inner integral diverges at the origin "
        "(need k > n|gamma|)");
  }

  RadialWeightFunction f;
  f.n_ = w.n;
  f.p_ = w.p;
  f.gamma_ = gamma;
  f.phi_inf_ = w.phi_inf;
  f.phi_k_ = k;
  f.pole_exponent_ = pole_exponent;
  f.u0_ = kLogRadiusMin;
  f.du_ = (kLogRadiusMax - kLogRadiusMin) / kTableIntervals;

  // Cumulative inner integral I(r) = int_1^r (phi/t) G^{|gamma|} dt on the
  // log grid, anchored at I(1) = 0 (grid midpoint).
  const int m = kTableIntervals;
  const int mid = m / 2;
  std::vector<double> inner(static_cast<std::size_t>(m) + 1, 0.0);
  auto at = [&](int j) { return kLogRadiusMin + f.du_ * j; };
  for (int j = mid; j < m; ++j) {
    inner[static_cast<std::size_t>(j) + 1] =
        inner[static_cast<std::size_t>(j)] + gl4_panel(at(j), at(j + 1), w.n, abs_gamma, w.phi_inf, k);
  }
  for (int j = mid; j > 0; --j) {
    inner[static_cast<std::size_t>(j) - 1] =
        inner[static_cast<std::size_t>(j)] - gl4_panel(at(j - 1), at(j), w.n, abs_gamma, w.phi_inf, k);
  }

  // Positivity bound: beta0 must exceed int_0^1 (phi/t) G^{|gamma|} dt. The
  // portion below the table is a power-law tail, estimated analytically.
  const double rmin = std::exp(kLogRadiusMin);
  const double tail0 = w.phi_inf * std::pow(rmin, k - pole_exponent) / (k - pole_exponent);
  f.bound_ = -inner.front() + tail0;

  if (std::isnan(w.beta0)) {
    // Tail-matched constant: cancels the G^{-|gamma|} mode so that
    // f -> phi_inf/|gamma| at the fastest possible rate.
    const double g1 = std::exp(abs_gamma * log_g(w.n, 0.0));
    double match = 0.0;
    for (int j = mid; j < m; ++j) {
      match += gl4_matching_panel(at(j), at(j + 1), w.n, abs_gamma, w.phi_inf, k);
    }
    const double rmax = std::exp(kLogRadiusMax);
    if (abs_gamma < 2.0) {
      match += (w.n + 1) * w.phi_inf * std::pow(rmax, abs_gamma - 2.0) / (2.0 - abs_gamma);
    }
    const double matched = (w.phi_inf / abs_gamma) * g1 - match;
    if (matched > f.bound_) {
      f.beta0_ = matched;
      f.policy_ = Beta0Policy::kMatched;
    } else {
      f.beta0_ = 2.0 * f.bound_;
      f.policy_ = Beta0Policy::kDefault;
    }
  } else {
    if (!(w.beta0 > f.bound_)) {
      std::ostringstream msg;
      msg << "radial weight: beta0 = " << w.beta0 << " violates the strict positivity bound "
          << f.bound_ << " (f would vanish inside the unit ball)";
      throw std::invalid_argument(msg.str());
    }
    f.beta0_ = w.beta0;
    f.policy_ = Beta0Policy::kUser;
  }

  f.values_.resize(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j) {
    f.values_[static_cast<std::size_t>(j)] =
        std::exp(gamma * log_g(w.n, at(j))) * (inner[static_cast<std::size_t>(j)] + f.beta0_);
  }
  f.slopes_ = monotone_slopes(f.values_, f.du_);
  return f;
}

std::vector<double> kf_profile(const SphereFunction& f, double p, const SphereGrid& grid,
                               const ProjectiveField& pf, int workers) {
  validate_projective_field(pf);
  if (f.n() != grid.n() || pf.n != grid.n()) {
    throw std::invalid_argument("kf_profile: dimension mismatch");
  }
  const int m = grid.n() + 1;
  std::vector<double> kf(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    const double* X = grid.node(i);
    double xi[3] = {0.0, 0.0, 0.0};
    field_on_sphere(pf, X, xi);
    double grad[3] = {0.0, 0.0, 0.0};
    f.gradient(X, grad);
    double dxif = 0.0;
    for (int c = 0; c < m; ++c) dxif += grad[c] * xi[c];
    kf[i] = dxif + beta_weight(pf, X, p) * f.value(X);
  });
  return kf;
}

InsolvabilityCertificate certify_insolvability(const SphereFunction& f, double p,
                                               const SphereGrid& grid, const ProjectiveField& pf,
                                               int workers) {
  const std::vector<double> kf = kf_profile(f, p, grid, pf, workers);
  InsolvabilityCertificate cert;
  cert.field = pf;
  cert.node_count = kf.size();
  cert.max_kf = kf[0];
  cert.worst_node = 0;
  for (std::size_t i = 0; i < kf.size(); ++i) {
    if (kf[i] > cert.max_kf) {
      cert.max_kf = kf[i];
      cert.worst_node = i;
    }
    if (kf[i] < kCertifyStrictLevel) ++cert.strict_count;
  }
  cert.strict_fraction = static_cast<double>(cert.strict_count) / static_cast<double>(cert.node_count);
  cert.sign_ok = cert.max_kf <= kCertifyMaxTolerance;
  cert.strict_ok = cert.strict_fraction >= kCertifyStrictFraction;
  cert.certified = cert.sign_ok && cert.strict_ok;
  return cert;
}

InsolvabilityCertificate certify_insolvability(const CriticalWeight& f, double p,
                                               const SphereGrid& grid, int workers) {
  return certify_insolvability(f, p, grid, f.certification_field(), workers);
}

InsolvabilityCertificate certify_insolvability(const RadialWeightFunction& f, double p,
                                               const SphereGrid& grid, int workers) {
  return certify_insolvability(f, p, grid, f.certification_field(), workers);
}

}  // namespace lpmk
