#pragma once

#include <array>
#include <cstdint>

#include "lpmk/sphere_function.hpp"
#include "lpmk/sphere_geometry.hpp"
#include "lpmk/support_function.hpp"

/// The projective-field identity apparatus: fields generated by a matrix
/// acting on homogeneous coordinates, the associated zero-mean weight beta,
/// and the integral of (grad_xi f + beta f) h^p over S^n, which vanishes
/// whenever h solves det W(h) = f h^{p-1}.
namespace lpmk {

/// Parameters (A, B, C, D) of a projective vector field. In the south chart
/// the field is xi^k = (C.x) x_k + (A_{kj} - D delta_{kj}) x_j - B_k; on the
/// sphere this is V(X) = Lambda X - <X, Lambda X> X for the homogeneous
/// generator Lambda = [[A, B], [C^T, D]], which is the form evaluated here
/// (bounded, smooth, and hemisphere-independent; the mirrored north-chart
/// field, with B and C negated, pulls back to the same sphere field).
struct ProjectiveField {
  int n = 1;
  /// Row-major n x n, symmetric and trace-free (the trace is a gauge choice:
  /// adding c I to Lambda does not change the sphere field or beta).
  std::array<double, 4> a{0.0, 0.0, 0.0, 0.0};
  std::array<double, 2> b{0.0, 0.0};
  std::array<double, 2> c{0.0, 0.0};
  double d = 0.0;
};

/// Throws std::invalid_argument unless A is symmetric and trace-free within
/// 1e-14 and n is supported.
void validate_projective_field(const ProjectiveField& pf);

/// The homogeneous generator Lambda, row-major (n+1) x (n+1).
std::array<double, 9> lambda_matrix(const ProjectiveField& pf);

/// Uniform draw of all parameters from [-1, 1) with A symmetrized and
/// trace-projected; deterministic for a given seed across platforms.
ProjectiveField random_projective_field(int n, std::uint64_t seed);

/// Tangent vector of the field at unit X (writes n+1 ambient components):
/// V(X) = Lambda X - <X, Lambda X> X. Continuous across the equator.
void field_on_sphere(const ProjectiveField& pf, const double* X, double* out);

/// Reference per-hemisphere evaluation: the chart expression composed with
/// the chart differential of cp's hemisphere (tests verify it agrees with
/// field_on_sphere away from the equator).
void chart_field(const ProjectiveField& pf, const ChartPoint& cp, double* out);

/// sigma = div(xi)/(n+1) = C.x - n D/(n+1) in the south chart (trace-free A).
double chart_sigma(const ProjectiveField& pf, const double* x);

/// The weight beta(X) = ((p+n+1)/(n+1)) * [tr Lambda - (n+1) X^T Lambda X].
/// Smooth and bounded on all of S^n, identically zero for p = -n-1 and for
/// antisymmetric (rotation) generators, with exact zero sphere mean.
double beta_weight(const ProjectiveField& pf, const double* X, double p);

/// Integral of K_f h^p dsigma with K_f = grad_xi f + beta f, the directional
/// derivative taken along field_on_sphere. Vanishes (up to quadrature error)
/// whenever h solves det W = f h^{p-1} and p <= -n-1; otherwise a diagnostic
/// value.
double identity_integral(const SphereFunction& f, const SupportFunction& h, double p,
                         const ProjectiveField& pf, const SphereGrid& grid, int workers = 1);

}  // namespace lpmk
