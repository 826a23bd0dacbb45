#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "lpmk/pohozaev.hpp"
#include "lpmk/sphere_function.hpp"
#include "lpmk/sphere_geometry.hpp"

/// Weights f for which det W = f h^{p-1} admits no convex solution, certified
/// by sign-definiteness of K_f = grad_xi f + beta f along a projective field.
namespace lpmk {

/// The weight |X_{n+1}|^D + C: equal to (1+|x|^2)^{-D/2} + C in either
/// gnomonic chart, globally Lipschitz for D >= 1, positive, and with
/// one-signed derivative along the dilation field.
class CriticalWeight final : public SphereFunction {
 public:
  CriticalWeight(int n, double exponent, double offset);

  int n() const override { return n_; }
  double value(const double* X) const override;
  void gradient(const double* X, double* out) const override;

  double exponent() const { return d_; }
  double offset() const { return c_; }

  /// The dilation field used to certify this weight: the reversed, D-scaled
  /// generator (d = -D), along which K_f = -D^2 |x|^2 (1+|x|^2)^{-D/2-1} at
  /// the critical exponent p = -n-1.
  ProjectiveField certification_field() const;

 private:
  int n_;
  double d_;
  double c_;
};

/// Factory; throws std::invalid_argument unless D > 0 and C > 0.
CriticalWeight critical_f(int n, double exponent, double offset);

/// How the integration constant of a radial weight was chosen.
enum class Beta0Policy {
  kUser,     ///< caller-supplied value, validated against the positivity bound
  kMatched,  ///< tail-matched value that cancels the slow r^{-|gamma|} mode
  kDefault   ///< twice the positivity lower bound (matched value inadmissible)
};

/// Input parameters of a rotationally symmetric insolvability weight.
struct RadialWeight {
  int n = 1;
  /// Exponent of the equation; requires p < -n-1 so gamma = (p+n+1)/(n+1) < 0.
  double p = -4.0;
  /// Limit of the source profile phi(r) = phi_inf * r^k/(1+r^k) at infinity.
  double phi_inf = 1.0;
  /// Decay power k; 0 selects ceil(n|gamma|) + 2, the least integer margin
  /// that keeps phi(r) r^{-n|gamma|-1} integrable at the origin.
  int phi_k = 0;
  /// Integration constant; NaN selects the matched/default policy.
  double beta0 = std::numeric_limits<double>::quiet_NaN();
};

/// A resolved radial weight: f(r) tabulated on a log grid over [1e-6, 1e6]
/// with monotone cubic (Fritsch-Carlson) interpolation in log r, extended to
/// the sphere as a function of r = |X'|/|X_{n+1}| (even across the equator).
class RadialWeightFunction final : public SphereFunction {
 public:
  int n() const override { return n_; }
  double value(const double* X) const override;
  void gradient(const double* X, double* out) const override;

  /// Interpolated f(r); power-law continuation f ~ r^{n|gamma|} below the
  /// table, constant continuation above. Throws for r < 0.
  double radial_value(double r) const;
  /// r f'(r), the log-radius derivative of the interpolant.
  double log_derivative(double r) const;
  /// Direct quadrature evaluation of the defining integral at one radius
  /// (slow; used to cross-check the tabulation and for residual tests).
  double evaluate_exact(double r) const;
  /// The source profile phi(r) = phi_inf r^k/(1+r^k).
  double phi(double r) const;

  double p() const { return p_; }
  double gamma() const { return gamma_; }
  double phi_inf() const { return phi_inf_; }
  int phi_k() const { return phi_k_; }
  double beta0() const { return beta0_; }
  Beta0Policy beta0_policy() const { return policy_; }
  /// The strict lower bound on beta0 (integral of (phi/t) G^{|gamma|} over
  /// (0,1)) below which f would vanish inside the unit ball.
  double beta0_lower_bound() const { return bound_; }

  /// Dilation field (d = +1, chart field -x) along which K_f = -phi(r).
  ProjectiveField certification_field() const;

  std::size_t table_size() const { return values_.size(); }
  double table_radius(std::size_t j) const;
  double table_value(std::size_t j) const { return values_[j]; }

 private:
  friend RadialWeightFunction resolve_radial_f(const RadialWeight& w);
  RadialWeightFunction() = default;

  int n_ = 1;
  double p_ = 0.0;
  double gamma_ = 0.0;
  double phi_inf_ = 1.0;
  int phi_k_ = 0;
  double beta0_ = 0.0;
  double bound_ = 0.0;
  Beta0Policy policy_ = Beta0Policy::kDefault;
  double u0_ = 0.0;  ///< log of the smallest tabulated radius
  double du_ = 0.0;  ///< uniform log-grid spacing
  double pole_exponent_ = 0.0;  ///< n |gamma|
  std::vector<double> values_;
  std::vector<double> slopes_;  ///< d f / d(log r) at the table nodes
};

/// Resolve f(r) = G(r)^gamma [ int_1^r (phi/t) G(t)^{-gamma} dt + beta0 ]
/// with G(r) = (1+r^2)^{(n+1)/2} / r^n. Throws std::invalid_argument if the
/// parameters are out of range, if phi decays too slowly for the integral to
/// converge at the origin, or if a caller-supplied beta0 violates the strict
/// positivity bound.
RadialWeightFunction resolve_radial_f(const RadialWeight& w);

/// Node-wise sign certificate for K_f = grad_xi f + beta f.
struct InsolvabilityCertificate {
  double max_kf = 0.0;             ///< most positive node value of K_f
  std::size_t worst_node = 0;      ///< node attaining max_kf
  double strict_fraction = 0.0;    ///< fraction of nodes with K_f < -1e-6
  std::size_t strict_count = 0;
  std::size_t node_count = 0;
  bool sign_ok = false;            ///< max_kf <= 1e-9
  bool strict_ok = false;          ///< strict_fraction >= 0.99
  bool certified = false;          ///< both checks passed
  ProjectiveField field;           ///< the field the certificate used
};

inline constexpr double kCertifyMaxTolerance = 1e-9;
inline constexpr double kCertifyStrictLevel = -1e-6;
inline constexpr double kCertifyStrictFraction = 0.99;

/// K_f at every grid node along the given field.
std::vector<double> kf_profile(const SphereFunction& f, double p, const SphereGrid& grid,
                               const ProjectiveField& pf, int workers = 1);

/// Certification along an explicit field (no-solution logic: a one-signed,
/// almost-everywhere strict K_f contradicts the integral identity satisfied
/// by any solution).
InsolvabilityCertificate certify_insolvability(const SphereFunction& f, double p,
                                               const SphereGrid& grid, const ProjectiveField& pf,
                                               int workers = 1);

/// Convenience overloads using each construction's own field.
InsolvabilityCertificate certify_insolvability(const CriticalWeight& f, double p,
                                               const SphereGrid& grid, int workers = 1);
InsolvabilityCertificate certify_insolvability(const RadialWeightFunction& f, double p,
                                               const SphereGrid& grid, int workers = 1);

}  // namespace lpmk
