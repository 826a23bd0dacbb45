#pragma once

#include <vector>

#include "lpmk/sphere_geometry.hpp"
#include "lpmk/support_function.hpp"
#include "lpmk/symmetry.hpp"

namespace lpmk {

/// Scale h so the constraint integral \int h^p dsigma = alpha_n holds: the
/// factor is c = (alpha_n / \int h^p)^{1/p}. Requires h > 0 on the grid;
/// throws std::invalid_argument if the constraint integral is nonfinite.
SupportFunction normalize(const SupportFunction& h, double p, const SphereGrid& grid,
                          int workers = 0);

/// The functional I(h) = -(n+1) * V(h) = -\int h det W(h) dsigma driven to a
/// minimum by the descent scheme. Throws if h fails its convexity certificate.
double objective(const SupportFunction& h, const SphereGrid& grid, int workers = 0);

/// Quadratic form of the normalized second variation of I at the constant 1,
/// evaluated by quadrature:
///   (n+1) [ \int |grad xi|^2 - (n+1-p) \int |xi - mean(xi)|^2 ].
/// The gradient term is obtained by parts from the frame-Hessian trace,
/// \int |grad xi|^2 = -\int xi (tr W(xi) - n xi).
double second_variation_formula(const SupportFunction& xi, double p, const SphereGrid& grid,
                                int workers = 0);

/// Central second difference of eps -> I(normalize(1 + eps xi)) at eps = 0,
/// Richardson-extrapolated over the given step sizes (error series in eps^2).
/// Throws std::invalid_argument for an empty or nonpositive step list and
/// propagates convexity failures of 1 +- eps xi.
double second_variation_fd(const SupportFunction& xi, double p, const SphereGrid& grid,
                           const std::vector<double>& eps_list = {1e-2, 5e-3},
                           int workers = 0);

/// The exponent threshold n+1-lambda_1(n) below which the constant solution
/// becomes unstable along the first symmetric eigenfunction. Computed from
/// the symmetry module's lambda_1 for n <= 2 and from the closed form
/// lambda_1 = 3(n+2) (degree-3 eigenvalue) above; verified against -2n-5.
double instability_threshold(int n);

struct OptimizerSettings {
  /// Initial (and maximal) line-search step.
  double step = 1.0;
  int max_iterations = 20000;
  /// Convergence threshold on the norm of the projected composite gradient.
  double tolerance = 1e-8;
  /// Margin eps_c of the logarithmic barrier keeping the smallest eigenvalue
  /// of W(u) above eps_c at every node; must lie in (0, 0.5].
  double convexity_margin = 1e-3;
  /// Initial weight of the barrier term; decays geometrically once the
  /// Euler-Lagrange residual falls below 1e-3.
  double barrier_weight = 1.0;
  int workers = 0;
};

/// Descent state summary of one iterate, used for the a-priori bounds log and
/// the barrier schedule.
struct IterateDiagnostics {
  double objective = 0.0;
  double lambda = 0.0;
  double el_residual = 0.0;
  double min_w_eigenvalue = 0.0;
  double min_u = 0.0;
  double max_u = 0.0;
  double mean_u = 0.0;
  /// |\int u^p - alpha_n|.
  double lp_error = 0.0;
};

/// Converged critical point of the constrained functional.
struct CriticalPoint {
  SupportFunction u;
  /// Coordinates of u over the invariant basis (constant element first).
  std::vector<double> coefficients;
  /// I(u) = -(n+1) V(u).
  double objective = 0.0;
  /// Euler-Lagrange multiplier lambda = (n+1) V / alpha_n = -I / alpha_n.
  double lambda = 0.0;
  /// sup |det W(u) - lambda u^{p-1}| / lambda over the grid.
  double el_residual = 0.0;
  /// sup |u - mean(u)| over the grid.
  double nonconstancy = 0.0;
  /// Smallest eigenvalue of W(u) over the grid at convergence.
  double min_w_eigenvalue = 0.0;
  /// Empirical bounds realized along the accepted descent trajectory.
  double max_u = 0.0;
  double min_u = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
  /// |\int u^p - alpha_n| at the returned point.
  double lp_constraint_error = 0.0;
};

/// Minimization of I(u) over the cone of symmetric convex support functions
/// with the constraint \int u^p = alpha_n, parameterized by coordinates over
/// the invariant spectral basis (constant plus all group-invariant harmonics
/// of degree <= degree_cutoff). Symmetry is exact by construction; the
/// constraint is restored after every trial step by closed-form rescaling.
class VariationalProblem {
 public:
  /// Builds grid, full symmetry group, invariant basis, and per-node tables
  /// of basis values and frame Hessians. Requires n in {1,2}, p <= -n, a
  /// degree cutoff reaching the first invariant degree, and valid settings.
  VariationalProblem(int n, double p, int degree_cutoff, int resolution,
                     OptimizerSettings settings = {});

  int n() const { return n_; }
  double p() const { return p_; }
  int degree_cutoff() const { return degree_cutoff_; }
  const SphereGrid& grid() const { return grid_; }
  const SymmetryGroup& group() const { return group_; }
  const OptimizerSettings& settings() const { return settings_; }
  /// Number of basis elements, constant included.
  int basis_size() const { return static_cast<int>(mode_degree_.size()); }
  /// Harmonic degree of basis element i (0 for the constant).
  int mode_degree(int i) const { return mode_degree_[i]; }
  /// Degree of the first non-constant invariant mode.
  int first_mode_degree() const { return mode_degree_[1]; }

  /// Coordinates of the constant u = 1.
  std::vector<double> constant_coefficients() const;
  /// Coordinates of normalize(1 + amplitude * xi) with xi the first
  /// non-constant invariant basis element.
  std::vector<double> seed_coefficients(double amplitude) const;

  /// Rescale coordinates in place so the represented function satisfies the
  /// constraint; returns false if the function is nonpositive somewhere or
  /// the constraint integral is nonfinite.
  bool normalize_in_place(std::vector<double>& c) const;
  /// Throwing wrapper of normalize_in_place.
  std::vector<double> normalize_coefficients(std::vector<double> c) const;

  /// Assemble the support function represented by the coordinates.
  SupportFunction to_support(const std::vector<double>& c) const;

  /// Discrete I(u_c) from the per-node tables (no convexity check).
  double objective_value(const std::vector<double>& c) const;
  /// I(u_c) plus barrier_weight times the hinged log-barrier on the smallest
  /// W-eigenvalue; +infinity if u_c <= 0 or the eigenvalue hits the margin.
  double composite_value(const std::vector<double>& c, double barrier_weight) const;
  /// Gradient of c -> composite_value(normalize(c)) at a feasible point
  /// (tangent to the constraint manifold).
  std::vector<double> composite_gradient(const std::vector<double>& c,
                                         double barrier_weight) const;
  /// Objective, multiplier, Euler-Lagrange residual, W-eigenvalue and value
  /// range of the current iterate.
  IterateDiagnostics diagnostics(const std::vector<double>& c) const;

 private:
  void check_size(const std::vector<double>& c) const;
  /// Per-node values u_j, frame-Hessian components, determinant, and
  /// smallest-eigenvalue data for the represented function.
  void assemble_nodes(const std::vector<double>& c, std::vector<double>& u,
                      std::vector<double>& w0, std::vector<double>& w1,
                      std::vector<double>& w3, std::vector<double>& det,
                      std::vector<double>& lam) const;

  int n_;
  double p_;
  int degree_cutoff_;
  OptimizerSettings settings_;
  SphereGrid grid_;
  SymmetryGroup group_;
  /// Shared harmonic basis (n = 2 only).
  std::shared_ptr<const HarmonicBasis> hb_;
  /// Trig modes (n = 1 only), aligned with basis elements 1..m.
  std::vector<TrigMode> trig_modes_;
  /// Full-basis coefficient columns per element (n = 2 only).
  std::vector<std::vector<double>> embed_;
  /// Harmonic degree per element; element 0 is the constant.
  std::vector<int> mode_degree_;
  /// Per-element per-node basis values and frame-Hessian components. For
  /// n = 1 the Hessian is the scalar w0 = (1 - k^2) * value; w1/w3 are unused.
  std::vector<std::vector<double>> val_;
  std::vector<std::vector<double>> hw0_, hw1_, hw3_;
};

/// Projected gradient descent with Armijo backtracking, re-normalization
/// after every trial step, and the convexity barrier. Seeds at
/// normalize(1 + seed_amplitude * xi_{mu_1}). Throws std::runtime_error with
/// a diagnostic if the iteration budget is exhausted or the line search
/// stalls away from a critical point.
CriticalPoint minimize(const VariationalProblem& prob, double seed_amplitude = 0.05);

}  // namespace lpmk
