#include "lpmk/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "lpmk/parallel.hpp"
#include "lpmk/spectral.hpp"

namespace lpmk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
/// A stalled line search still counts as converged below this gradient norm.
constexpr double kStallGradientNorm = 1e-6;
/// Euler-Lagrange residual level that triggers the barrier-weight decay.
constexpr double kBarrierDecayTrigger = 1e-3;
/// Newton endgame entry: only iterates with gradients below this hand over.
constexpr double kPolishEntryGradient = 1e-3;
/// Newton endgame budget and finite-difference step for its Jacobian.
constexpr int kPolishIterations = 40;
constexpr double kPolishJacobianStep = 1e-6;
/// Gradient level below which further Newton steps cannot gain anything.
constexpr double kPolishFloor = 1e-13;

/// Barrier hinge: active below activation = 10 * margin, zero above, C^1 at
/// the junction, +infinity as lambda decreases to the margin.
double barrier_hinge(double lambda, double margin) {
  const double activation = 10.0 * margin;
  if (lambda >= activation) return 0.0;
  const double span = activation - margin;
  return -std::log((lambda - margin) / span) - (activation - lambda) / span;
}

double barrier_hinge_slope(double lambda, double margin) {
  const double activation = 10.0 * margin;
  if (lambda >= activation) return 0.0;
  const double span = activation - margin;
  return -1.0 / std::max(lambda - margin, 1e-300) + 1.0 / span;
}

double norm2(const std::vector<double>& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  return std::sqrt(sq);
}

/// Newton endgame on the projected first-order system. The Armijo loop is
/// noise-limited near a minimizer: the decrease available at gradient norm g
/// scales like g^2 and falls below the quadrature rounding floor while g is
/// still around 1e-6 on stiff mode sets. Newton steps on the projected
/// gradient need no certified decrease and converge quadratically, so they
/// push the in-subspace gradient to machine scale. Steps are damped on the
/// gradient norm and the Jacobian solve uses a rank-revealing factorization
/// (the normalization direction is a structural null vector).
void newton_polish(const VariationalProblem& prob, std::vector<double>& c,
                   double& gradient_norm) {
  const int m = prob.basis_size();
  std::vector<double> g = prob.composite_gradient(c, 0.0);
  double gn = norm2(g);
  for (int it = 0; it < kPolishIterations && gn > kPolishFloor; ++it) {
    Eigen::MatrixXd jac(m, m);
    bool jac_ok = true;
    for (int i = 0; i < m && jac_ok; ++i) {
      const double eps = kPolishJacobianStep * std::max(1.0, std::abs(c[static_cast<std::size_t>(i)]));
      std::vector<double> cp = c;
      std::vector<double> cm = c;
      cp[static_cast<std::size_t>(i)] += eps;
      cm[static_cast<std::size_t>(i)] -= eps;
      if (!prob.normalize_in_place(cp) || !prob.normalize_in_place(cm)) {
        jac_ok = false;
        break;
      }
      const std::vector<double> gp = prob.composite_gradient(cp, 0.0);
      const std::vector<double> gm = prob.composite_gradient(cm, 0.0);
      for (int r = 0; r < m; ++r)
        jac(r, i) = (gp[static_cast<std::size_t>(r)] - gm[static_cast<std::size_t>(r)]) / (2.0 * eps);
    }
    if (!jac_ok) break;
    Eigen::VectorXd rhs(m);
    for (int r = 0; r < m; ++r) rhs(r) = -g[static_cast<std::size_t>(r)];
    const Eigen::VectorXd delta = jac.colPivHouseholderQr().solve(rhs);
    if (!delta.allFinite()) break;
    bool stepped = false;
    double t = 1.0;
    for (int halving = 0; halving < 20 && !stepped; ++halving) {
      std::vector<double> trial = c;
      for (int i = 0; i < m; ++i) trial[static_cast<std::size_t>(i)] += t * delta(i);
      if (prob.normalize_in_place(trial) &&
          std::isfinite(prob.composite_value(trial, 0.0))) {
        std::vector<double> gt = prob.composite_gradient(trial, 0.0);
        const double gtn = norm2(gt);
        if (gtn < gn) {
          c = std::move(trial);
          g = std::move(gt);
          gn = gtn;
          stepped = true;
        }
      }
      t *= 0.5;
    }
    if (!stepped) break;
  }
  gradient_norm = gn;
}

/// The function 1 + eps * xi in the representation of xi.
SupportFunction one_plus(const SupportFunction& xi, double eps) {
  std::vector<double> c = xi.coefficients();
  for (double& v : c) v *= eps;
  if (xi.basis()) {
    c[0] += std::sqrt(sphere_area(xi.n()));
    return SupportFunction::spectral(xi.basis(), std::move(c));
  }
  if (c.empty()) c.push_back(0.0);
  c[0] += 1.0;
  return SupportFunction::fourier(std::move(c));
}

/// Smallest eigenvalue of the symmetric 2x2 matrix {{a, b}, {b, d}}.
double min_eig2(double a, double b, double d) {
  const double mean = 0.5 * (a + d);
  const double disc = std::hypot(0.5 * (a - d), b);
  return mean - disc;
}

/// Unit eigenvector of {{a, b}, {b, d}} for its smallest eigenvalue.
void min_eigvec2(double a, double b, double d, double* v) {
  const double lam = min_eig2(a, b, d);
  double v0 = b;
  double v1 = lam - a;
  double norm = std::hypot(v0, v1);
  if (norm < 1e-14 * (std::abs(a) + std::abs(d) + std::abs(b) + 1.0)) {
    v0 = lam - d;
    v1 = b;
    norm = std::hypot(v0, v1);
  }
  if (norm < 1e-300) {
    v[0] = 1.0;
    v[1] = 0.0;
    return;
  }
  v[0] = v0 / norm;
  v[1] = v1 / norm;
}

}  // namespace

SupportFunction normalize(const SupportFunction& h, double p, const SphereGrid& grid,
                          int workers) {
  const double s = lp_integral(h, p, grid, workers);
  if (!std::isfinite(s) || s <= 0.0)
    throw std::invalid_argument("normalize: constraint integral is not finite and positive");
  const double c = std::pow(grid.alpha() / s, 1.0 / p);
  if (!std::isfinite(c) || c <= 0.0)
    throw std::invalid_argument("normalize: scale factor is not finite and positive");
  return h.scaled(c);
}

double objective(const SupportFunction& h, const SphereGrid& grid, int workers) {
  return -(grid.n() + 1.0) * volume(h, grid, workers);
}

double second_variation_formula(const SupportFunction& xi, double p, const SphereGrid& grid,
                                int workers) {
  if (xi.n() != grid.n())
    throw std::invalid_argument("second_variation_formula: dimension mismatch");
  const int n = grid.n();
  const std::size_t count = grid.size();
  const int w = resolve_workers(workers);
  std::vector<double> mean_terms(count), sq_terms(count), trace_terms(count);
  parallel_for(count, w, [&](std::size_t j) {
    const double* X = grid.node(j);
    const double v = xi.value(X);
    const double tr = xi.hessian_frame(X).trace();
    const double wt = grid.weight(j);
    mean_terms[j] = wt * v;
    sq_terms[j] = wt * v * v;
    trace_terms[j] = wt * v * tr;
  });
  const double mean_int = pairwise_sum(mean_terms.data(), count);
  const double sq_int = pairwise_sum(sq_terms.data(), count);
  const double trace_int = pairwise_sum(trace_terms.data(), count);
  // Integration by parts: \int |grad xi|^2 = -\int xi (tr W(xi) - n xi).
  const double grad_sq = -trace_int + n * sq_int;
  const double deviation_sq = sq_int - mean_int * mean_int / grid.alpha();
  return (n + 1.0) * (grad_sq - (n + 1.0 - p) * deviation_sq);
}

double second_variation_fd(const SupportFunction& xi, double p, const SphereGrid& grid,
                           const std::vector<double>& eps_list, int workers) {
  if (xi.n() != grid.n())
    throw std::invalid_argument("second_variation_fd: dimension mismatch");
  if (eps_list.empty())
    throw std::invalid_argument("second_variation_fd: need at least one step size");
  for (double e : eps_list)
    if (!std::isfinite(e) || e <= 0.0)
      throw std::invalid_argument("second_variation_fd: step sizes must be positive");
  for (std::size_t i = 0; i < eps_list.size(); ++i)
    for (std::size_t j = i + 1; j < eps_list.size(); ++j)
      if (eps_list[i] == eps_list[j])
        throw std::invalid_argument("second_variation_fd: step sizes must be distinct");

  const double base = objective(normalize(one_plus(xi, 0.0), p, grid, workers), grid, workers);
  std::vector<double> diffs(eps_list.size());
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    const double e = eps_list[i];
    const double plus = objective(normalize(one_plus(xi, e), p, grid, workers), grid, workers);
    const double minus = objective(normalize(one_plus(xi, -e), p, grid, workers), grid, workers);
    diffs[i] = (plus - 2.0 * base + minus) / (e * e);
  }
  // Neville table in eps^2: the central difference has an even error series.
  std::vector<double> eps_sq(eps_list.size());
  for (std::size_t i = 0; i < eps_list.size(); ++i) eps_sq[i] = eps_list[i] * eps_list[i];
  for (std::size_t level = 1; level < diffs.size(); ++level)
    for (std::size_t i = 0; i + level < diffs.size(); ++i)
      diffs[i] = (eps_sq[i] * diffs[i + level] - eps_sq[i + level] * diffs[i]) /
                 (eps_sq[i] - eps_sq[i + level]);
  return diffs[0];
}

double instability_threshold(int n) {
  if (n < 1) throw std::invalid_argument("instability_threshold: need n >= 1");
  double l1 = 0.0;
  if (n <= 2) {
    const SymmetryGroup g = build_group(simplex_vertices(n), false);
    l1 = lambda1(n, g);
  } else {
    // First invariant degree is 3 in every dimension: eigenvalue mu(mu+n-1).
    l1 = 3.0 * (n + 2.0);
  }
  const double value = n + 1.0 - l1;
  if (std::abs(value - (-2.0 * n - 5.0)) > 1e-9)
    throw std::runtime_error("instability_threshold: computed threshold disagrees with -2n-5");
  return value;
}

VariationalProblem::VariationalProblem(int n, double p, int degree_cutoff, int resolution,
                                       OptimizerSettings settings)
    : n_(n),
      p_(p),
      degree_cutoff_(degree_cutoff),
      settings_(settings),
      grid_(n, resolution),
      group_(build_group(simplex_vertices(n), false)) {
  if (n != 1 && n != 2)
    throw std::invalid_argument("VariationalProblem: supports n = 1 and n = 2");
  if (!(p <= -static_cast<double>(n)))
    throw std::invalid_argument("VariationalProblem: need p <= -n");
  if (!(settings_.step > 0.0) || !std::isfinite(settings_.step))
    throw std::invalid_argument("VariationalProblem: step must be positive");
  if (settings_.max_iterations < 1)
    throw std::invalid_argument("VariationalProblem: need at least one iteration");
  if (!(settings_.tolerance > 0.0))
    throw std::invalid_argument("VariationalProblem: tolerance must be positive");
  if (!(settings_.convexity_margin > 0.0) || settings_.convexity_margin > 0.5)
    throw std::invalid_argument("VariationalProblem: convexity margin must lie in (0, 0.5]");
  if (!(settings_.barrier_weight >= 0.0) || !std::isfinite(settings_.barrier_weight))
    throw std::invalid_argument("VariationalProblem: barrier weight must be nonnegative");

  const std::size_t count = grid_.size();
  mode_degree_.push_back(0);
  if (n_ == 1) {
    trig_modes_ = invariant_trig_modes(group_, degree_cutoff_);
    for (const TrigMode& m : trig_modes_) mode_degree_.push_back(m.k);
  } else {
    hb_ = std::make_shared<HarmonicBasis>(2, degree_cutoff_);
    const std::size_t total = hb_->total_dimension();
    embed_.emplace_back(total, 0.0);
    embed_[0][0] = std::sqrt(sphere_area(2));
    std::size_t offset = hb_->dimension(0);
    for (int mu = 1; mu <= degree_cutoff_; ++mu) {
      const InvariantSubspace sub = invariant_dimension(*hb_, mu, group_);
      for (const std::vector<double>& col : sub.coefficients) {
        std::vector<double> full(total, 0.0);
        for (std::size_t i = 0; i < col.size(); ++i) full[offset + i] = col[i];
        embed_.push_back(std::move(full));
        mode_degree_.push_back(mu);
      }
      offset += hb_->dimension(mu);
    }
  }
  if (mode_degree_.size() < 2)
    throw std::invalid_argument(
        "VariationalProblem: degree cutoff below the first invariant degree");

  const int m = basis_size();
  val_.assign(m, std::vector<double>(count));
  hw0_.assign(m, std::vector<double>(count));
  if (n_ == 2) {
    hw1_.assign(m, std::vector<double>(count));
    hw3_.assign(m, std::vector<double>(count));
  }
  // Element 0 is the constant 1 with W(1) = I exactly.
  std::fill(val_[0].begin(), val_[0].end(), 1.0);
  std::fill(hw0_[0].begin(), hw0_[0].end(), 1.0);
  if (n_ == 2) {
    std::fill(hw1_[0].begin(), hw1_[0].end(), 0.0);
    std::fill(hw3_[0].begin(), hw3_[0].end(), 1.0);
  }
  const int w = resolve_workers(settings_.workers);
  for (int i = 1; i < m; ++i) {
    if (n_ == 1) {
      const TrigMode mode = trig_modes_[i - 1];
      const double factor = 1.0 - static_cast<double>(mode.k) * mode.k;
      parallel_for(count, w, [&](std::size_t j) {
        const double* X = grid_.node(j);
        const double theta = std::atan2(X[1], X[0]);
        const double v = mode.c * std::cos(mode.k * theta) + mode.s * std::sin(mode.k * theta);
        val_[i][j] = v;
        hw0_[i][j] = factor * v;
      });
    } else {
      const SupportFunction element = SupportFunction::spectral(hb_, embed_[i]);
      parallel_for(count, w, [&](std::size_t j) {
        const double* X = grid_.node(j);
        val_[i][j] = element.value(X);
        const FrameHessian fh = element.hessian_frame(X);
        hw0_[i][j] = fh.w[0];
        hw1_[i][j] = 0.5 * (fh.w[1] + fh.w[2]);
        hw3_[i][j] = fh.w[3];
      });
    }
  }
}

void VariationalProblem::check_size(const std::vector<double>& c) const {
  if (static_cast<int>(c.size()) != basis_size())
    throw std::invalid_argument("VariationalProblem: coefficient count mismatch");
  for (double v : c)
    if (!std::isfinite(v))
      throw std::invalid_argument("VariationalProblem: nonfinite coefficient");
}

std::vector<double> VariationalProblem::constant_coefficients() const {
  std::vector<double> c(basis_size(), 0.0);
  c[0] = 1.0;
  return c;
}

std::vector<double> VariationalProblem::seed_coefficients(double amplitude) const {
  if (!std::isfinite(amplitude))
    throw std::invalid_argument("seed_coefficients: nonfinite amplitude");
  std::vector<double> c = constant_coefficients();
  c[1] = amplitude;
  if (!normalize_in_place(c))
    throw std::invalid_argument("seed_coefficients: seed amplitude leaves the positive cone");
  return c;
}

void VariationalProblem::assemble_nodes(const std::vector<double>& c, std::vector<double>& u,
                                        std::vector<double>& w0, std::vector<double>& w1,
                                        std::vector<double>& w3, std::vector<double>& det,
                                        std::vector<double>& lam) const {
  const std::size_t count = grid_.size();
  const int m = basis_size();
  u.resize(count);
  w0.resize(count);
  det.resize(count);
  lam.resize(count);
  if (n_ == 2) {
    w1.resize(count);
    w3.resize(count);
  }
  const int w = resolve_workers(settings_.workers);
  parallel_for(count, w, [&](std::size_t j) {
    double uj = 0.0, a = 0.0, b = 0.0, d = 0.0;
    for (int i = 0; i < m; ++i) {
      const double ci = c[i];
      uj += ci * val_[i][j];
      a += ci * hw0_[i][j];
      if (n_ == 2) {
        b += ci * hw1_[i][j];
        d += ci * hw3_[i][j];
      }
    }
    u[j] = uj;
    w0[j] = a;
    if (n_ == 2) {
      w1[j] = b;
      w3[j] = d;
      det[j] = a * d - b * b;
      lam[j] = min_eig2(a, b, d);
    } else {
      det[j] = a;
      lam[j] = a;
    }
  });
}

bool VariationalProblem::normalize_in_place(std::vector<double>& c) const {
  check_size(c);
  const std::size_t count = grid_.size();
  const int m = basis_size();
  const int w = resolve_workers(settings_.workers);
  std::vector<double> u(count);
  parallel_for(count, w, [&](std::size_t j) {
    double uj = 0.0;
    for (int i = 0; i < m; ++i) uj += c[i] * val_[i][j];
    u[j] = uj;
  });
  for (std::size_t j = 0; j < count; ++j)
    if (!(u[j] > 0.0)) return false;
  std::vector<double> terms(count);
  parallel_for(count, w, [&](std::size_t j) {
    terms[j] = grid_.weight(j) * std::pow(u[j], p_);
  });
  const double s = pairwise_sum(terms.data(), count);
  if (!std::isfinite(s) || s <= 0.0) return false;
  const double scale = std::pow(grid_.alpha() / s, 1.0 / p_);
  if (!std::isfinite(scale) || scale <= 0.0) return false;
  for (double& v : c) v *= scale;
  return true;
}

std::vector<double> VariationalProblem::normalize_coefficients(std::vector<double> c) const {
  if (!normalize_in_place(c))
    throw std::invalid_argument(
        "normalize_coefficients: function is nonpositive or the constraint integral is not "
        "finite");
  return c;
}

SupportFunction VariationalProblem::to_support(const std::vector<double>& c) const {
  check_size(c);
  if (n_ == 1) {
    std::vector<double> fc(2 * static_cast<std::size_t>(degree_cutoff_) + 1, 0.0);
    fc[0] = c[0];
    for (std::size_t i = 0; i < trig_modes_.size(); ++i) {
      const TrigMode& mode = trig_modes_[i];
      fc[2 * static_cast<std::size_t>(mode.k) - 1] += c[i + 1] * mode.c;
      fc[2 * static_cast<std::size_t>(mode.k)] += c[i + 1] * mode.s;
    }
    return SupportFunction::fourier(std::move(fc));
  }
  std::vector<double> full(hb_->total_dimension(), 0.0);
  for (int i = 0; i < basis_size(); ++i)
    for (std::size_t k = 0; k < full.size(); ++k) full[k] += c[i] * embed_[i][k];
  return SupportFunction::spectral(hb_, std::move(full));
}

double VariationalProblem::objective_value(const std::vector<double>& c) const {
  check_size(c);
  std::vector<double> u, w0, w1, w3, det, lam;
  assemble_nodes(c, u, w0, w1, w3, det, lam);
  const std::size_t count = grid_.size();
  const int w = resolve_workers(settings_.workers);
  std::vector<double> terms(count);
  parallel_for(count, w, [&](std::size_t j) {
    terms[j] = grid_.weight(j) * u[j] * det[j];
  });
  return -pairwise_sum(terms.data(), count);
}

double VariationalProblem::composite_value(const std::vector<double>& c,
                                           double barrier_weight) const {
  check_size(c);
  if (!(barrier_weight >= 0.0))
    throw std::invalid_argument("composite_value: barrier weight must be nonnegative");
  std::vector<double> u, w0, w1, w3, det, lam;
  assemble_nodes(c, u, w0, w1, w3, det, lam);
  const std::size_t count = grid_.size();
  const double margin = settings_.convexity_margin;
  for (std::size_t j = 0; j < count; ++j)
    if (!(u[j] > 0.0) || !(lam[j] > margin)) return kInf;
  const int w = resolve_workers(settings_.workers);
  std::vector<double> obj_terms(count), bar_terms(count);
  parallel_for(count, w, [&](std::size_t j) {
    const double wt = grid_.weight(j);
    obj_terms[j] = wt * u[j] * det[j];
    bar_terms[j] = wt * barrier_hinge(lam[j], margin);
  });
  const double value = -pairwise_sum(obj_terms.data(), count) +
                       barrier_weight * pairwise_sum(bar_terms.data(), count);
  return std::isfinite(value) ? value : kInf;
}

std::vector<double> VariationalProblem::composite_gradient(const std::vector<double>& c,
                                                           double barrier_weight) const {
  check_size(c);
  if (!(barrier_weight >= 0.0))
    throw std::invalid_argument("composite_gradient: barrier weight must be nonnegative");
  std::vector<double> u, w0, w1, w3, det, lam;
  assemble_nodes(c, u, w0, w1, w3, det, lam);
  const std::size_t count = grid_.size();
  const int m = basis_size();
  const int w = resolve_workers(settings_.workers);
  const double margin = settings_.convexity_margin;

  // Shared per-node data: u^{p-1}, barrier slope, eigenvector of the
  // smallest W-eigenvalue.
  std::vector<double> up1(count), slope(count), ev0, ev1;
  if (n_ == 2) {
    ev0.resize(count);
    ev1.resize(count);
  }
  parallel_for(count, w, [&](std::size_t j) {
    up1[j] = std::pow(u[j], p_ - 1.0);
    slope[j] = barrier_weight > 0.0 ? barrier_hinge_slope(lam[j], margin) : 0.0;
    if (n_ == 2) {
      double v[2];
      min_eigvec2(w0[j], w1[j], w3[j], v);
      ev0[j] = v[0];
      ev1[j] = v[1];
    }
  });

  // Scalars entering the tangential projection: discrete I and the radial
  // barrier derivative sum(b' * lambda).
  std::vector<double> tmp(count);
  parallel_for(count, w, [&](std::size_t j) {
    tmp[j] = grid_.weight(j) * u[j] * det[j];
  });
  const double objective_disc = -pairwise_sum(tmp.data(), count);
  parallel_for(count, w, [&](std::size_t j) {
    tmp[j] = grid_.weight(j) * slope[j] * lam[j];
  });
  const double barrier_radial = pairwise_sum(tmp.data(), count);
  const double kappa =
      ((n_ + 1.0) * objective_disc + barrier_weight * barrier_radial) / grid_.alpha();

  std::vector<double> grad(m);
  std::vector<double> terms(count);
  for (int i = 0; i < m; ++i) {
    parallel_for(count, w, [&](std::size_t j) {
      const double vi = val_[i][j];
      double cof_contract, eig_deriv;
      if (n_ == 2) {
        cof_contract = w3[j] * hw0_[i][j] + w0[j] * hw3_[i][j] - 2.0 * w1[j] * hw1_[i][j];
        const double a = ev0[j], b = ev1[j];
        eig_deriv = a * a * hw0_[i][j] + 2.0 * a * b * hw1_[i][j] + b * b * hw3_[i][j];
      } else {
        cof_contract = hw0_[i][j];
        eig_deriv = hw0_[i][j];
      }
      terms[j] = grid_.weight(j) *
                 (-(vi * det[j] + u[j] * cof_contract) +
                  barrier_weight * slope[j] * eig_deriv - kappa * up1[j] * vi);
    });
    grad[i] = pairwise_sum(terms.data(), count);
  }
  return grad;
}

IterateDiagnostics VariationalProblem::diagnostics(const std::vector<double>& c) const {
  check_size(c);
  std::vector<double> u, w0, w1, w3, det, lam;
  assemble_nodes(c, u, w0, w1, w3, det, lam);
  const std::size_t count = grid_.size();
  const int w = resolve_workers(settings_.workers);
  std::vector<double> tmp(count);
  parallel_for(count, w, [&](std::size_t j) {
    tmp[j] = grid_.weight(j) * u[j] * det[j];
  });
  IterateDiagnostics diag;
  diag.objective = -pairwise_sum(tmp.data(), count);
  diag.lambda = -diag.objective / grid_.alpha();
  parallel_for(count, w, [&](std::size_t j) {
    tmp[j] = grid_.weight(j) * u[j];
  });
  diag.mean_u = pairwise_sum(tmp.data(), count) / grid_.alpha();
  parallel_for(count, w, [&](std::size_t j) {
    tmp[j] = grid_.weight(j) * std::pow(u[j], p_);
  });
  diag.lp_error = std::abs(pairwise_sum(tmp.data(), count) - grid_.alpha());
  double el = 0.0, min_lam = kInf, min_u = kInf, max_u = -kInf;
  for (std::size_t j = 0; j < count; ++j) {
    el = std::max(el, std::abs(det[j] - diag.lambda * std::pow(u[j], p_ - 1.0)));
    min_lam = std::min(min_lam, lam[j]);
    min_u = std::min(min_u, u[j]);
    max_u = std::max(max_u, u[j]);
  }
  diag.el_residual = diag.lambda != 0.0 ? el / std::abs(diag.lambda) : kInf;
  diag.min_w_eigenvalue = min_lam;
  diag.min_u = min_u;
  diag.max_u = max_u;
  return diag;
}

CriticalPoint minimize(const VariationalProblem& prob, double seed_amplitude) {
  const OptimizerSettings& st = prob.settings();
  std::vector<double> c = prob.seed_coefficients(seed_amplitude);
  double barrier_weight = st.barrier_weight;
  double current = prob.composite_value(c, barrier_weight);
  if (!std::isfinite(current))
    throw std::runtime_error("minimize: seed leaves the barrier domain");

  double traj_max_u = -kInf, traj_min_u = kInf;
  double step = st.step;
  double gradient_norm = kInf;
  int iterations = 0;
  bool converged = false;
  bool floor_reached = false;

  for (int iter = 0; iter < st.max_iterations; ++iter) {
    iterations = iter;
    const IterateDiagnostics diag = prob.diagnostics(c);
    traj_max_u = std::max(traj_max_u, diag.max_u);
    traj_min_u = std::min(traj_min_u, diag.min_u);

    const std::vector<double> grad = prob.composite_gradient(c, barrier_weight);
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    gradient_norm = std::sqrt(sq);
    if (gradient_norm < st.tolerance) {
      converged = true;
      break;
    }

    // The barrier decays geometrically once the iterate is consistent with
    // the Euler-Lagrange equation at the 1e-3 level.
    if (diag.el_residual < kBarrierDecayTrigger && barrier_weight > 0.0) {
      barrier_weight *= 0.5;
      current = prob.composite_value(c, barrier_weight);
    }

    bool accepted = false;
    double decrease = 0.0;
    double t = step;
    for (int halving = 0; halving < 60; ++halving) {
      std::vector<double> trial(c);
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= t * grad[i];
      if (prob.normalize_in_place(trial)) {
        const double value = prob.composite_value(trial, barrier_weight);
        if (value <= current - 1e-4 * t * sq) {
          decrease = current - value;
          c = std::move(trial);
          current = value;
          accepted = true;
          step = std::min(st.step, 2.0 * t);
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) {
      floor_reached = true;
      break;
    }
    // Accepted steps whose decrease sits at the rounding floor of the
    // quadrature cannot certify further progress either.
    if (gradient_norm <= kPolishEntryGradient &&
        decrease <= 1e-13 * (1.0 + std::abs(current))) {
      floor_reached = true;
      break;
    }
  }

  // Endgame: once the first-order phase can no longer certify decreases (or
  // its budget ran out near the floor), switch to Newton steps, provided the
  // hinge is inactive at the iterate so the weight-free system is the right
  // one to solve.
  if (!converged && gradient_norm <= kPolishEntryGradient &&
      prob.diagnostics(c).min_w_eigenvalue >= 10.0 * st.convexity_margin) {
    newton_polish(prob, c, gradient_norm);
  }
  if (!converged && gradient_norm <= kStallGradientNorm) converged = true;

  const IterateDiagnostics diag = prob.diagnostics(c);
  traj_max_u = std::max(traj_max_u, diag.max_u);
  traj_min_u = std::min(traj_min_u, diag.min_u);
  if (!converged) {
    std::ostringstream msg;
    if (floor_reached) {
      msg << "minimize: line search stalled at iteration " << iterations
          << " with gradient norm " << gradient_norm << " and objective " << diag.objective;
    } else {
      msg << "minimize: no convergence within " << st.max_iterations
          << " iterations; gradient norm " << gradient_norm << ", Euler-Lagrange residual "
          << diag.el_residual;
    }
    throw std::runtime_error(msg.str());
  }
  if (!(diag.min_w_eigenvalue > st.convexity_margin))
    throw std::runtime_error("minimize: converged point violates the convexity margin");

  return CriticalPoint{prob.to_support(c),
                       c,
                       diag.objective,
                       diag.lambda,
                       diag.el_residual,
                       std::max(diag.max_u - diag.mean_u, diag.mean_u - diag.min_u),
                       diag.min_w_eigenvalue,
                       traj_max_u,
                       traj_min_u,
                       iterations,
                       gradient_norm,
                       diag.lp_error};
}

}  // namespace lpmk
