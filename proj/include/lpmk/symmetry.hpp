#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "lpmk/poly.hpp"
#include "lpmk/rational.hpp"
#include "lpmk/spectral.hpp"
#include "lpmk/sphere_geometry.hpp"

/// Regular-simplex symmetry apparatus: the n+2 evenly spread unit vertices,
/// the finite orthogonal group permuting them, symmetrization projectors, and
/// the invariant harmonic subspaces they select (including the degree-3
/// witness polynomial and the sharp Poincare constant on the symmetric class).
namespace lpmk {

/// Vertices of a regular simplex inscribed in S^n, stored exactly over
/// Q[sqrt(3)]. Invariants: |q_i| = 1, <q_i,q_j> = -1/(n+1) for i != j,
/// sum_i q_i = 0, and any n+1 vertices are linearly independent.
struct SimplexFrame {
  int n = 1;
  /// (n+2) rows of n+1 exact coordinates.
  ExactMatrix<QuadExt> vertices;
  /// Double-precision copies of the rows.
  std::vector<std::array<double, 3>> vertices_d;
};

/// The standard frame: n=1 places vertices at 90, 210, 330 degrees; n=2 uses
/// the tetrahedron (+-1,+-1,+-1)/sqrt(3) with an even number of minus signs.
SimplexFrame simplex_vertices(int n);

/// Throws std::invalid_argument unless the frame satisfies the simplex
/// invariants exactly.
void validate_frame(const SimplexFrame& frame);

/// One orthogonal map permuting the simplex vertices.
struct GroupElement {
  ExactMatrix<QuadExt> matrix;                 // exact (n+1)x(n+1)
  std::vector<std::vector<double>> matrix_d;   // double copy
  std::vector<int> permutation;                // vertex i maps to vertex permutation[i]
  int det = 1;

  /// out = M X (n+1 components).
  void apply(int n, const double* X, double* out) const;
};

/// Finite group of orthogonal maps permuting the simplex vertices, in a
/// deterministic order (lexicographic by vertex permutation; identity first).
class SymmetryGroup {
 public:
  SymmetryGroup(SimplexFrame frame, bool special_only, std::vector<GroupElement> elements);

  int n() const { return frame_.n; }
  bool special_only() const { return special_only_; }
  std::size_t order() const { return elements_.size(); }
  const GroupElement& element(std::size_t i) const { return elements_.at(i); }
  const std::vector<GroupElement>& elements() const { return elements_; }
  const SimplexFrame& frame() const { return frame_; }

 private:
  SimplexFrame frame_;
  bool special_only_;
  std::vector<GroupElement> elements_;
};

/// Enumerate all vertex permutations, solve q_{pi(i)} = M q_i over the first
/// n+1 vertices, and keep every exactly orthogonal solution (det = +1 only
/// when special_only). Orders: full (n+2)!, special (n+2)!/2. Throws
/// std::invalid_argument if a permutation induces a non-orthogonal map, which
/// signals a broken frame.
SymmetryGroup build_group(const SimplexFrame& frame, bool special_only);

/// The one-element group {identity} on the standard frame (baseline for
/// unrestricted spectra).
SymmetryGroup trivial_group(int n);

/// Group-average nodal data: out_i = (1/|G|) sum_g values[node index of
/// g(X_i)]. Requires the grid to be closed under the group action (each
/// mapped node must coincide with a grid node within 1e-12); for n=1 this
/// holds when the node count is divisible by 6. Throws std::invalid_argument
/// otherwise.
std::vector<double> symmetrize(const SymmetryGroup& g, const SphereGrid& grid,
                               const std::vector<double>& values);

/// Group-average a polynomial: (1/|G|) sum_g p(g X). Exactly invariant and
/// idempotent up to rounding.
Poly<double> symmetrize(const SymmetryGroup& g, const Poly<double>& p);

/// Orthonormal basis of the group-invariant harmonic polynomials of one
/// degree, with its dimension (the rank of the group-averaging projector on
/// that harmonic space).
struct InvariantSubspace {
  int mu = 0;
  int dimension = 0;
  std::vector<Poly<double>> basis;
  /// Coordinates of each basis element over the orthonormal degree-mu
  /// harmonic block, one inner vector per element of `basis`.
  std::vector<std::vector<double>> coefficients;
};

/// Invariant harmonic subspace of degree mu under g. The projector is formed
/// in the orthonormal harmonic basis with inner products taken from exact
/// monomial sphere averages; rank uses threshold 1e-9 times the largest
/// singular value.
InvariantSubspace invariant_dimension(int n, int mu, const SymmetryGroup& g);

/// Same, reusing a prebuilt harmonic basis (must satisfy mu <= max_degree).
InvariantSubspace invariant_dimension(const HarmonicBasis& hb, int mu, const SymmetryGroup& g);

/// Sharp Poincare constant on the g-invariant zero-mean class: find the
/// smallest mu >= 1 with a nonzero invariant harmonic subspace and return
/// mu(n + mu - 1). Each invariant basis element is additionally checked to
/// have zero quadrature mean. Requires mu_max >= 4; throws
/// std::runtime_error if no invariant subspace exists up to mu_max.
double lambda1(int n, const SymmetryGroup& g, int mu_max = 6);

/// The degree-3 witness: sum of l_i l_j l_k over ordered distinct index
/// triples, where l_i(y) = <q_i, y>. Equals 6 e_3(l_1, ..., l_{n+2});
/// harmonic (exactly, over Q[sqrt(3)]), invariant under the full group, odd
/// (hence zero sphere mean), and a Laplace-Beltrami eigenfunction with
/// eigenvalue 3(n+2).
Poly<QuadExt> build_h_simplex(const SimplexFrame& frame);

/// Invariant combination of cos(k theta), sin(k theta) for n=1: the function
/// c*cos(k theta) + s*sin(k theta) with c^2 + s^2 = 1.
struct TrigMode {
  int k = 0;
  double c = 1.0;
  double s = 0.0;
};

/// All invariant trigonometric modes with frequency 1 <= k <= k_max for an
/// n=1 group, via the 2x2 group-averaging projector on each frequency pair.
/// (The constant mode k=0 is always invariant and is not listed.) This is the
/// scalable high-frequency counterpart of invariant_dimension: monomial
/// coefficients of cos/sin(k theta) grow like 2^k, so polynomial evaluation
/// is abandoned in favor of direct trigonometric evaluation.
std::vector<TrigMode> invariant_trig_modes(const SymmetryGroup& g, int k_max);

}  // namespace lpmk
