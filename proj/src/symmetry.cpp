#include "lpmk/symmetry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace lpmk {
namespace {

constexpr double kPi = std::numbers::pi;

ExactMatrix<QuadExt> exact_identity(int d) {
  ExactMatrix<QuadExt> m(d, std::vector<QuadExt>(d, QuadExt(0)));
  for (int i = 0; i < d; ++i) m[i][i] = QuadExt(1);
  return m;
}

std::vector<std::vector<double>> to_double_matrix(const ExactMatrix<QuadExt>& m) {
  std::vector<std::vector<double>> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    out[i].resize(m[i].size());
    for (std::size_t j = 0; j < m[i].size(); ++j) out[i][j] = to_double(m[i][j]);
  }
  return out;
}

std::array<double, 3> to_double_row(const std::vector<QuadExt>& row) {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = to_double(row[j]);
  return out;
}

/// Index of the grid node coinciding with X, or throws: the grid is required
/// to be closed under whatever map produced X.
std::size_t locate_node(const SphereGrid& grid, const std::vector<double>& ring_t,
                        const double* X) {
  const int n = grid.n();
  std::size_t idx = 0;
  if (n == 1) {
    const std::size_t N = grid.size();
    double th = std::atan2(X[1], X[0]);
    if (th < 0) th += 2.0 * kPi;
    long k = std::lround(th * static_cast<double>(N) / (2.0 * kPi) - 0.5);
    const long nl = static_cast<long>(N);
    k = ((k % nl) + nl) % nl;
    idx = static_cast<std::size_t>(k);
  } else {
    const std::size_t nphi = 2 * static_cast<std::size_t>(grid.resolution());
    const auto it = std::lower_bound(ring_t.begin(), ring_t.end(), X[2]);
    std::size_t ring = static_cast<std::size_t>(std::distance(ring_t.begin(), it));
    if (ring == ring_t.size() ||
        (ring > 0 && std::abs(ring_t[ring - 1] - X[2]) < std::abs(ring_t[ring] - X[2])))
      --ring;
    double phi = std::atan2(X[1], X[0]);
    if (phi < 0) phi += 2.0 * kPi;
    long j = std::lround(phi * static_cast<double>(nphi) / (2.0 * kPi) - 0.5);
    const long nl = static_cast<long>(nphi);
    j = ((j % nl) + nl) % nl;
    idx = ring * nphi + static_cast<std::size_t>(j);
  }
  const double* node = grid.node(idx);
  double d2 = 0.0;
  for (int v = 0; v <= n; ++v) d2 += (node[v] - X[v]) * (node[v] - X[v]);
  if (d2 > 1e-24)
    throw std::invalid_argument("symmetrize: grid is not closed under the group action");
  return idx;
}

/// Monomial exponents of exact degree mu in `dim` variables, with the offset
/// mapping global canonical indices to positions within the block.
struct DegreeBlock {
  std::vector<Exponent> exps;
  std::size_t offset = 0;
};

DegreeBlock degree_block(int dim, int mu) {
  DegreeBlock b;
  b.offset = mu > 0 ? monomial_count(dim, mu - 1) : 0;
  for (const Exponent& e : monomial_exponents(dim, mu))
    if (exponent_degree(e) == mu) b.exps.push_back(e);
  return b;
}

/// Matrix of the substitution y -> M y on the degree-mu monomial block:
/// column a holds the expansion of (M y)^{alpha_a}.
Eigen::MatrixXd substitution_matrix(const DegreeBlock& block, int dim, int mu,
                                    const std::vector<std::vector<double>>& m) {
  const std::size_t K = block.exps.size();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(K, K);
  for (std::size_t a = 0; a < K; ++a) {
    const Poly<double> composed =
        Poly<double>::monomial(dim, block.exps[a], 1.0).compose_linear(m);
    composed.for_each_term([&](const Exponent& e, const double& v) {
      c(static_cast<long>(monomial_index(dim, e) - block.offset), static_cast<long>(a)) = v;
    });
  }
  (void)mu;
  return c;
}

/// Inner-product kernel on the degree-mu block: W_ab = alpha_n * exact sphere
/// average of y^{alpha_a + alpha_b}.
Eigen::MatrixXd block_inner_kernel(const DegreeBlock& block, int dim, double alpha) {
  const std::size_t K = block.exps.size();
  Eigen::MatrixXd w(K, K);
  for (std::size_t a = 0; a < K; ++a) {
    for (std::size_t b = a; b < K; ++b) {
      const Exponent e{block.exps[a][0] + block.exps[b][0], block.exps[a][1] + block.exps[b][1],
                       block.exps[a][2] + block.exps[b][2]};
      w(a, b) = alpha * to_double(sphere_monomial_average(dim, e));
      w(b, a) = w(a, b);
    }
  }
  return w;
}

void unit_mode(double c, double s, TrigMode& out) {
  const double nrm = std::hypot(c, s);
  c /= nrm;
  s /= nrm;
  if ((std::abs(c) >= std::abs(s) ? c : s) < 0) {
    c = -c;
    s = -s;
  }
  out.c = c;
  out.s = s;
}

}  // namespace

SimplexFrame simplex_vertices(int n) {
  if (n != 1 && n != 2) throw std::invalid_argument("simplex_vertices: n must be 1 or 2");
  SimplexFrame f;
  f.n = n;
  const Rational half(1, 2);
  if (n == 1) {
    // Vertices at 90, 210, 330 degrees: (0,1), (-sqrt3/2,-1/2), (sqrt3/2,-1/2).
    f.vertices = {{QuadExt(0), QuadExt(1)},
                  {QuadExt(Rational(0), -half), QuadExt(-half)},
                  {QuadExt(Rational(0), half), QuadExt(-half)}};
  } else {
    // Tetrahedron (+-1,+-1,+-1)/sqrt3, even number of minus signs.
    const QuadExt t(Rational(0), Rational(1, 3));  // 1/sqrt3 = sqrt3/3
    f.vertices = {{t, t, t}, {t, -t, -t}, {-t, t, -t}, {-t, -t, t}};
  }
  f.vertices_d.reserve(f.vertices.size());
  for (const auto& row : f.vertices) f.vertices_d.push_back(to_double_row(row));
  return f;
}

void validate_frame(const SimplexFrame& frame) {
  const int n = frame.n;
  if (n != 1 && n != 2) throw std::invalid_argument("SimplexFrame: n must be 1 or 2");
  const std::size_t m = static_cast<std::size_t>(n) + 2;
  if (frame.vertices.size() != m)
    throw std::invalid_argument("SimplexFrame: expected n+2 vertices");
  const QuadExt target(Rational(-1, n + 1));
  for (std::size_t i = 0; i < m; ++i) {
    if (frame.vertices[i].size() != static_cast<std::size_t>(n) + 1)
      throw std::invalid_argument("SimplexFrame: vertex dimension mismatch");
    for (std::size_t j = i; j < m; ++j) {
      QuadExt dot(0);
      for (std::size_t v = 0; v <= static_cast<std::size_t>(n); ++v)
        dot += frame.vertices[i][v] * frame.vertices[j][v];
      const QuadExt want = (i == j) ? QuadExt(1) : target;
      if (dot != want)
        throw std::invalid_argument("SimplexFrame: vertices are not evenly spread unit vectors");
    }
  }
  for (std::size_t v = 0; v <= static_cast<std::size_t>(n); ++v) {
    QuadExt sum(0);
    for (std::size_t i = 0; i < m; ++i) sum += frame.vertices[i][v];
    if (!sum.is_zero()) throw std::invalid_argument("SimplexFrame: vertices do not sum to zero");
  }
}

void GroupElement::apply(int n, const double* X, double* out) const {
  for (int i = 0; i <= n; ++i) {
    double acc = 0.0;
    for (int j = 0; j <= n; ++j) acc += matrix_d[i][j] * X[j];
    out[i] = acc;
  }
}

SymmetryGroup::SymmetryGroup(SimplexFrame frame, bool special_only,
                             std::vector<GroupElement> elements)
    : frame_(std::move(frame)), special_only_(special_only), elements_(std::move(elements)) {
  if (elements_.empty()) throw std::invalid_argument("SymmetryGroup: empty element list");
}

SymmetryGroup build_group(const SimplexFrame& frame, bool special_only) {
  validate_frame(frame);
  const int d = frame.n + 1;
  const int m = frame.n + 2;

  // Base matrix with the first n+1 vertices as columns; exact inverse.
  ExactMatrix<QuadExt> base(d, std::vector<QuadExt>(d));
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) base[r][c] = frame.vertices[c][r];
  const ExactMatrix<QuadExt> base_inv = invert(base);
  const ExactMatrix<QuadExt> id = exact_identity(d);

  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<GroupElement> elems;
  do {
    ExactMatrix<QuadExt> target(d, std::vector<QuadExt>(d));
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) target[r][c] = frame.vertices[perm[c]][r];
    ExactMatrix<QuadExt> mat = matmul(target, base_inv);

    // The map must also send the last vertex correctly and be orthogonal;
    // both hold automatically for a genuine regular simplex.
    for (int r = 0; r < d; ++r) {
      QuadExt acc(0);
      for (int c = 0; c < d; ++c) acc += mat[r][c] * frame.vertices[m - 1][c];
      if (acc != frame.vertices[perm[m - 1]][r])
        throw std::invalid_argument("build_group: permutation does not extend to a linear map");
    }
    ExactMatrix<QuadExt> mt(d, std::vector<QuadExt>(d));
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) mt[r][c] = mat[c][r];
    if (matmul(mt, mat) != id)
      throw std::invalid_argument("build_group: induced map is not orthogonal");

    const QuadExt det = determinant(mat);
    int det_i = 0;
    if (det == QuadExt(1)) det_i = 1;
    else if (det == QuadExt(-1)) det_i = -1;
    else throw std::invalid_argument("build_group: induced map has non-unit determinant");
    if (special_only && det_i != 1) continue;

    GroupElement e;
    e.matrix_d = to_double_matrix(mat);
    e.matrix = std::move(mat);
    e.permutation = perm;
    e.det = det_i;
    elems.push_back(std::move(e));
  } while (std::next_permutation(perm.begin(), perm.end()));

  return SymmetryGroup(frame, special_only, std::move(elems));
}

SymmetryGroup trivial_group(int n) {
  SimplexFrame frame = simplex_vertices(n);
  GroupElement e;
  e.matrix = exact_identity(n + 1);
  e.matrix_d = to_double_matrix(e.matrix);
  e.permutation.resize(n + 2);
  std::iota(e.permutation.begin(), e.permutation.end(), 0);
  e.det = 1;
  return SymmetryGroup(std::move(frame), true, {std::move(e)});
}

std::vector<double> symmetrize(const SymmetryGroup& g, const SphereGrid& grid,
                               const std::vector<double>& values) {
  if (g.n() != grid.n()) throw std::invalid_argument("symmetrize: dimension mismatch");
  if (values.size() != grid.size())
    throw std::invalid_argument("symmetrize: value count does not match grid");
  std::vector<double> ring_t;
  if (grid.n() == 2) {
    const std::size_t nphi = 2 * static_cast<std::size_t>(grid.resolution());
    for (int i = 0; i < grid.resolution(); ++i)
      ring_t.push_back(grid.node(static_cast<std::size_t>(i) * nphi)[2]);
  }
  const std::size_t N = grid.size();
  std::vector<double> out(N, 0.0);
  for (const GroupElement& e : g.elements()) {
    for (std::size_t i = 0; i < N; ++i) {
      double y[3] = {0.0, 0.0, 0.0};
      e.apply(grid.n(), grid.node(i), y);
      out[i] += values[locate_node(grid, ring_t, y)];
    }
  }
  const double inv = 1.0 / static_cast<double>(g.order());
  for (double& v : out) v *= inv;
  return out;
}

Poly<double> symmetrize(const SymmetryGroup& g, const Poly<double>& p) {
  if (p.dim() != g.n() + 1) throw std::invalid_argument("symmetrize: dimension mismatch");
  Poly<double> acc(p.dim(), p.degree());
  for (const GroupElement& e : g.elements()) {
    const Poly<double> mapped = p.compose_linear(e.matrix_d);
    mapped.for_each_term([&](const Exponent& ex, const double& c) { acc.add_term(ex, c); });
  }
  return acc * (1.0 / static_cast<double>(g.order()));
}

InvariantSubspace invariant_dimension(const HarmonicBasis& hb, int mu, const SymmetryGroup& g) {
  if (hb.n() != g.n()) throw std::invalid_argument("invariant_dimension: dimension mismatch");
  if (mu < 0 || mu > hb.max_degree())
    throw std::invalid_argument("invariant_dimension: degree out of range of the basis");
  const int dim = g.n() + 1;
  const std::vector<Poly<double>>& block = hb.degree(mu);
  const int m = static_cast<int>(block.size());
  const DegreeBlock db = degree_block(dim, mu);
  const std::size_t K = db.exps.size();

  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(K, m);
  for (int i = 0; i < m; ++i)
    block[i].for_each_term([&](const Exponent& e, const double& c) {
      coeffs(static_cast<long>(monomial_index(dim, e) - db.offset), i) = c;
    });
  const Eigen::MatrixXd kernel = block_inner_kernel(db, dim, sphere_area(g.n()));

  Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(m, m);
  for (const GroupElement& e : g.elements()) {
    const Eigen::MatrixXd mapped = substitution_matrix(db, dim, mu, e.matrix_d) * coeffs;
    proj += mapped.transpose() * kernel * coeffs;
  }
  proj /= static_cast<double>(g.order());
  proj = ((proj + proj.transpose()) * 0.5).eval();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(proj, Eigen::ComputeFullU);
  const Eigen::VectorXd sv = svd.singularValues();
  InvariantSubspace out;
  out.mu = mu;
  if (sv.size() == 0 || sv(0) < 1e-12) {
    out.dimension = 0;
    return out;
  }
  const double thresh = 1e-9 * sv(0);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > thresh) ++rank;
  out.dimension = rank;
  for (int k = 0; k < rank; ++k) {
    Poly<double> b(dim, mu);
    std::vector<double> col(m, 0.0);
    for (int i = 0; i < m; ++i) {
      col[i] = svd.matrixU()(i, k);
      if (col[i] == 0.0) continue;
      const Poly<double> scaled = block[i] * col[i];
      scaled.for_each_term([&](const Exponent& e, const double& c) { b.add_term(e, c); });
    }
    out.basis.push_back(std::move(b));
    out.coefficients.push_back(std::move(col));
  }
  return out;
}

InvariantSubspace invariant_dimension(int n, int mu, const SymmetryGroup& g) {
  return invariant_dimension(HarmonicBasis(n, mu), mu, g);
}

double lambda1(int n, const SymmetryGroup& g, int mu_max) {
  if (mu_max < 4) throw std::invalid_argument("lambda1: mu_max must be at least 4");
  if (n != g.n()) throw std::invalid_argument("lambda1: dimension mismatch");
  const HarmonicBasis hb(n, mu_max);
  const SphereGrid grid(n, 64);
  for (int mu = 1; mu <= mu_max; ++mu) {
    const InvariantSubspace sub = invariant_dimension(hb, mu, g);
    if (sub.dimension == 0) continue;
    for (const Poly<double>& b : sub.basis) {
      double mean = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i)
        mean += grid.weight(i) * eval_on_sphere(b, grid.node(i));
      if (std::abs(mean) > 1e-8)
        throw std::runtime_error("lambda1: invariant eigenfunction has nonzero mean");
    }
    return static_cast<double>(mu) * (n + mu - 1);
  }
  throw std::runtime_error("lambda1: no invariant subspace up to mu_max = " +
                           std::to_string(mu_max) + "; raise mu_max");
}

Poly<QuadExt> build_h_simplex(const SimplexFrame& frame) {
  validate_frame(frame);
  const int d = frame.n + 1;
  const int m = frame.n + 2;
  std::vector<Poly<QuadExt>> lin;
  lin.reserve(m);
  for (int i = 0; i < m; ++i) {
    Poly<QuadExt> l(d, 1);
    for (int v = 0; v < d; ++v) {
      Exponent e{0, 0, 0};
      e[v] = 1;
      l.set(e, frame.vertices[i][v]);
    }
    lin.push_back(std::move(l));
  }
  Poly<QuadExt> h(d, 3);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      for (int k = 0; k < m; ++k) {
        if (k == i || k == j) continue;
        const Poly<QuadExt> term = lin[i] * lin[j] * lin[k];
        term.for_each_term([&](const Exponent& e, const QuadExt& c) { h.add_term(e, c); });
      }
    }
  return h;
}

std::vector<TrigMode> invariant_trig_modes(const SymmetryGroup& g, int k_max) {
  if (g.n() != 1) throw std::invalid_argument("invariant_trig_modes: only defined for n=1");
  if (k_max < 1) throw std::invalid_argument("invariant_trig_modes: k_max must be positive");
  std::vector<TrigMode> out;
  for (int k = 1; k <= k_max; ++k) {
    Eigen::Matrix2d proj = Eigen::Matrix2d::Zero();
    for (const GroupElement& e : g.elements()) {
      // Base angle data straight from the 2x2 matrix: rotations are
      // [[c,-s],[s,c]]; reflections across the axis at angle b are
      // [[cos 2b, sin 2b], [sin 2b, -cos 2b]].
      double c = e.matrix_d[0][0];
      double s = (e.det == 1) ? e.matrix_d[1][0] : e.matrix_d[0][1];
      // (c + i s)^k by repeated multiplication.
      double ck = 1.0, sk = 0.0;
      for (int t = 0; t < k; ++t) {
        const double nc = ck * c - sk * s;
        sk = ck * s + sk * c;
        ck = nc;
      }
      Eigen::Matrix2d rep;
      if (e.det == 1)
        rep << ck, sk, -sk, ck;
      else
        rep << ck, sk, sk, -ck;
      proj += rep;
    }
    proj /= static_cast<double>(g.order());
    proj = ((proj + proj.transpose()) * 0.5).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(proj);
    const int rank = (es.eigenvalues()(0) > 0.5 ? 1 : 0) + (es.eigenvalues()(1) > 0.5 ? 1 : 0);
    if (rank == 2) {
      out.push_back(TrigMode{k, 1.0, 0.0});
      out.push_back(TrigMode{k, 0.0, 1.0});
    } else if (rank == 1) {
      TrigMode mode;
      mode.k = k;
      unit_mode(es.eigenvectors()(0, 1), es.eigenvectors()(1, 1), mode);
      out.push_back(mode);
    }
  }
  return out;
}

}  // namespace lpmk
