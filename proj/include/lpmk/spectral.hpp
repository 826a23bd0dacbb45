#pragma once

#include <Eigen/Core>
#include <vector>

#include "lpmk/poly.hpp"
#include "lpmk/sphere_geometry.hpp"

/// Homogeneous harmonic polynomials on R^{n+1} and their restrictions to S^n:
/// construction of a degree-by-degree orthonormal basis, exact harmonicity
/// certificates at low degree, and sphere-gradient evaluation for Rayleigh
/// quotients.
namespace lpmk {

/// Exact basis of the harmonic homogeneous polynomials of degree mu in n+1
/// variables: the rational nullspace of the Laplacian coefficient recurrence
/// sum_j a_{beta+2e_j} (beta_j+2)(beta_j+1) = 0 over all |beta| = mu-2.
/// Deterministic (free-variable enumeration order). Dimension is
/// binom(mu+n, n) - binom(mu+n-2, n): 2 for n=1 (mu >= 1), 2*mu+1 for n=2.
std::vector<Poly<Rational>> harmonic_basis_exact(int n, int mu);

/// Expected dimension of the degree-mu harmonic space on S^n.
int harmonic_dimension(int n, int mu);

/// Orthonormal real harmonic basis up to a degree cutoff.
///
/// Within each degree the raw rational nullspace basis is converted to double
/// and symmetrically orthonormalized (Loewdin: B V diag(1/sqrt(lambda)) from
/// the eigendecomposition of the exact-coefficient Gram matrix) with respect
/// to the S^n inner product integral b_i b_j dsigma. Distinct degrees are
/// orthogonal exactly (different Laplace-Beltrami eigenspaces).
class HarmonicBasis {
 public:
  HarmonicBasis(int n, int max_degree);

  int n() const { return n_; }
  int max_degree() const { return max_degree_; }
  int dimension(int mu) const;
  /// Orthonormal polynomials of degree mu (restrictions to S^n are the basis
  /// functions; the stored object is the solid homogeneous extension).
  const std::vector<Poly<double>>& degree(int mu) const;
  /// Total dimension over all degrees 0..max_degree.
  std::size_t total_dimension() const;

 private:
  int n_;
  int max_degree_;
  std::vector<std::vector<Poly<double>>> by_degree_;
};

/// Value of the restriction to S^n of a homogeneous polynomial at unit X.
double eval_on_sphere(const Poly<double>& p, const double* X);

/// Tangential (sphere) gradient at unit X of the restriction of a homogeneous
/// polynomial of degree mu: grad P - mu P X. Writes n+1 components.
void sphere_gradient(const Poly<double>& p, const double* X, double* out);

/// Quadrature Rayleigh quotient int |grad_S u|^2 / int u^2 for the
/// restriction of a homogeneous polynomial (u must be nonzero on the grid).
double rayleigh_quotient(const Poly<double>& p, const SphereGrid& grid, int workers = 1);

/// Matrix of the substitution f -> f(M .) on the orthonormal degree-mu
/// block: entry (j, i) = int b_i(M X) b_j(X) dsigma, so a function with
/// coefficient vector c maps to coefficients T c. Inner products use exact
/// monomial sphere averages (accurate to rounding).
Eigen::MatrixXd substitution_block_matrix(const HarmonicBasis& hb, int mu,
                                          const std::vector<std::vector<double>>& m);

}  // namespace lpmk
