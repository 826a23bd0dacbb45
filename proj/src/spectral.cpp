#include "lpmk/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lpmk/parallel.hpp"

namespace lpmk {
namespace {

/// Exponent tuples of exactly degree mu in `dim` variables, canonical order.
std::vector<Exponent> degree_block(int dim, int mu) {
  std::vector<Exponent> out;
  for (const Exponent& e : monomial_exponents(dim, mu))
    if (exponent_degree(e) == mu) out.push_back(e);
  return out;
}

}  // namespace

int harmonic_dimension(int n, int mu) {
  if (mu == 0) return 1;
  if (n == 1) return 2;
  if (n == 2) return 2 * mu + 1;
  throw std::invalid_argument("harmonic_dimension: n must be 1 or 2");
}

std::vector<Poly<Rational>> harmonic_basis_exact(int n, int mu) {
  if (n != 1 && n != 2) throw std::invalid_argument("harmonic_basis_exact: n must be 1 or 2");
  if (mu < 0) throw std::invalid_argument("harmonic_basis_exact: negative degree");
  const int dim = n + 1;
  const std::vector<Exponent> cols = degree_block(dim, mu);
  if (mu < 2) {
    // Every homogeneous polynomial of degree 0 or 1 is harmonic.
    std::vector<Poly<Rational>> out;
    for (const Exponent& e : cols) out.push_back(Poly<Rational>::monomial(dim, e, Rational(1)));
    return out;
  }
  const std::vector<Exponent> rows = degree_block(dim, mu - 2);
  ExactMatrix<Rational> m(rows.size(), std::vector<Rational>(cols.size(), Rational(0)));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int j = 0; j < dim; ++j) {
      Exponent a = rows[r];
      a[j] += 2;
      // Column lookup: canonical index within the degree block.
      for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c] == a) {
          m[r][c] = Rational((rows[r][j] + 2) * (rows[r][j] + 1));
          break;
        }
      }
    }
  }
  const ExactMatrix<Rational> null = nullspace(std::move(m));
  std::vector<Poly<Rational>> out;
  out.reserve(null.size());
  for (const auto& v : null) {
    Poly<Rational> p(dim, mu);
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (v[c] != 0) p.set(cols[c], v[c]);
    out.push_back(std::move(p));
  }
  return out;
}

HarmonicBasis::HarmonicBasis(int n, int max_degree) : n_(n), max_degree_(max_degree) {
  if (max_degree < 0) throw std::invalid_argument("HarmonicBasis: negative degree cutoff");
  const double alpha = sphere_area(n);
  by_degree_.resize(max_degree + 1);
  for (int mu = 0; mu <= max_degree; ++mu) {
    const std::vector<Poly<Rational>> raw = harmonic_basis_exact(n, mu);
    const int dim_mu = static_cast<int>(raw.size());
    if (dim_mu != harmonic_dimension(n, mu))
      throw std::runtime_error("HarmonicBasis: unexpected harmonic dimension at degree " +
                               std::to_string(mu));
    std::vector<Poly<double>> rawd;
    rawd.reserve(dim_mu);
    for (const auto& p : raw) rawd.push_back(p.convert<double>());

    // Gram matrix in the dsigma inner product; monomial averages are exact
    // rationals, so entries are accurate to one rounding each.
    Eigen::MatrixXd gram(dim_mu, dim_mu);
    for (int i = 0; i < dim_mu; ++i) {
      for (int j = i; j < dim_mu; ++j) {
        double acc = 0.0;
        rawd[i].for_each_term([&](const Exponent& ei, const double& ci) {
          rawd[j].for_each_term([&](const Exponent& ej, const double& cj) {
            const Exponent e{ei[0] + ej[0], ei[1] + ej[1], ei[2] + ej[2]};
            const Rational w = sphere_monomial_average(n + 1, e);
            if (w != 0) acc += ci * cj * to_double(w);
          });
        });
        gram(i, j) = acc * alpha;
        gram(j, i) = gram(i, j);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::runtime_error("HarmonicBasis: Gram matrix not positive definite");
    const Eigen::MatrixXd mix =
        es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();

    std::vector<Poly<double>> ortho;
    ortho.reserve(dim_mu);
    for (int k = 0; k < dim_mu; ++k) {
      Poly<double> b(n + 1, mu);
      for (int i = 0; i < dim_mu; ++i) {
        if (mix(i, k) == 0.0) continue;
        const Poly<double> scaled = rawd[i] * mix(i, k);
        scaled.for_each_term([&](const Exponent& e, const double& c) { b.add_term(e, c); });
      }
      ortho.push_back(std::move(b));
    }
    by_degree_[mu] = std::move(ortho);
  }
}

int HarmonicBasis::dimension(int mu) const {
  if (mu < 0 || mu > max_degree_) return 0;
  return static_cast<int>(by_degree_[mu].size());
}

const std::vector<Poly<double>>& HarmonicBasis::degree(int mu) const {
  if (mu < 0 || mu > max_degree_)
    throw std::invalid_argument("HarmonicBasis::degree: out of range");
  return by_degree_[mu];
}

std::size_t HarmonicBasis::total_dimension() const {
  std::size_t total = 0;
  for (const auto& block : by_degree_) total += block.size();
  return total;
}

double eval_on_sphere(const Poly<double>& p, const double* X) {
  std::array<double, 3> pt{0.0, 0.0, 0.0};
  for (int v = 0; v < p.dim(); ++v) pt[v] = X[v];
  return p.eval(pt);
}

void sphere_gradient(const Poly<double>& p, const double* X, double* out) {
  const int dim = p.dim();
  std::array<double, 3> pt{0.0, 0.0, 0.0};
  for (int v = 0; v < dim; ++v) pt[v] = X[v];
  const double mu = static_cast<double>(p.degree());
  const double val = p.eval(pt);
  for (int v = 0; v < dim; ++v) {
    const double dv = p.derivative(v).eval(pt);
    out[v] = dv - mu * val * X[v];
  }
}

Eigen::MatrixXd substitution_block_matrix(const HarmonicBasis& hb, int mu,
                                          const std::vector<std::vector<double>>& m) {
  const int dim = hb.n() + 1;
  if (static_cast<int>(m.size()) != dim)
    throw std::invalid_argument("substitution_block_matrix: matrix dimension mismatch");
  const std::vector<Exponent> exps = degree_block(dim, mu);
  const std::size_t K = exps.size();
  const std::size_t offset = mu > 0 ? monomial_count(dim, mu - 1) : 0;
  const std::vector<Poly<double>>& block = hb.degree(mu);
  const int nb = static_cast<int>(block.size());

  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(K, nb);
  for (int i = 0; i < nb; ++i)
    block[i].for_each_term([&](const Exponent& e, const double& c) {
      coeffs(static_cast<long>(monomial_index(dim, e) - offset), i) = c;
    });

  // Substitution on the monomial block: column a expands (M y)^{alpha_a}.
  Eigen::MatrixXd sub = Eigen::MatrixXd::Zero(K, K);
  for (std::size_t a = 0; a < K; ++a) {
    const Poly<double> composed = Poly<double>::monomial(dim, exps[a], 1.0).compose_linear(m);
    composed.for_each_term([&](const Exponent& e, const double& c) {
      sub(static_cast<long>(monomial_index(dim, e) - offset), static_cast<long>(a)) = c;
    });
  }

  // Inner-product kernel from exact monomial averages.
  const double alpha = sphere_area(hb.n());
  Eigen::MatrixXd kernel(K, K);
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = a; b < K; ++b) {
      const Exponent e{exps[a][0] + exps[b][0], exps[a][1] + exps[b][1], exps[a][2] + exps[b][2]};
      kernel(a, b) = alpha * to_double(sphere_monomial_average(dim, e));
      kernel(b, a) = kernel(a, b);
    }

  // T(j, i) = <b_i o M, b_j>.
  return ((sub * coeffs).transpose() * kernel * coeffs).transpose();
}

double rayleigh_quotient(const Poly<double>& p, const SphereGrid& grid, int workers) {
  const int dim = grid.n() + 1;
  if (p.dim() != dim) throw std::invalid_argument("rayleigh_quotient: dimension mismatch");
  const std::size_t count = grid.size();
  const double num = sum_terms(count, workers, [&](std::size_t i) {
    double g[3];
    sphere_gradient(p, grid.node(i), g);
    double n2 = 0.0;
    for (int v = 0; v < dim; ++v) n2 += g[v] * g[v];
    return grid.weight(i) * n2;
  });
  const double den = sum_terms(count, workers, [&](std::size_t i) {
    const double u = eval_on_sphere(p, grid.node(i));
    return grid.weight(i) * u * u;
  });
  if (den == 0.0) throw std::invalid_argument("rayleigh_quotient: zero function");
  return num / den;
}

}  // namespace lpmk
