#pragma once

#include <optional>

#include "lpmk/support_function.hpp"

/// Independent planar (n=1) oracle: rotationally started orbits of the
/// pendulum-type equation h'' + h = h^{p-1}, whose closed orbits with period
/// 2 pi / 3 lift to three-fold symmetric support functions solving
/// det W = h^{p-1} on S^1. Built on an adaptive Dormand-Prince integrator
/// with dense output and turning-point event location, entirely separate
/// from the spectral/variational machinery it cross-checks.
namespace lpmk {

/// Small-amplitude period limit 2 pi / sqrt(2 - p).
double period_limit(double p);

/// Period of the orbit through (h0, h' = 0): the time between the first two
/// upward turning points (h' = 0, h'' > 0) after the start, so the initial
/// stationary point never counts as an event. Throws std::invalid_argument
/// for h0 <= 0 or the equilibrium h0 = 1, std::runtime_error if the
/// integrator exhausts its step budget.
double period_map(double p, double h0);

/// Max drift of the conserved energy h'^2/2 + h^2/2 - h^p/p over one
/// integration of the given duration (integrator fidelity diagnostic).
double max_energy_drift(double p, double h0, double duration);

/// Whether a three-fold closed orbit exists: the period map is increasing
/// from its small-amplitude limit, so existence is 2 pi/sqrt(2-p) < 2 pi/3,
/// tested just off the equilibrium at h0 = 1 + 1e-4.
bool symmetric_solution_exists(double p);

/// A resolved three-fold orbit and its lift to S^1.
struct SymmetricSolution {
  double p = 0.0;
  double h0 = 0.0;        ///< turning-point amplitude with period exactly 2 pi/3
  double period = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;
  double objective = 0.0;      ///< I(u) = -2V computed from the lift coefficients
  double lift_residual = 0.0;  ///< max Monge-Ampere residual of the lift, f == 1
  SupportFunction lift;        ///< Fourier support function, maximum at theta = 0
};

/// Solve period(h0) = 2 pi / 3 for h0 and lift the orbit; empty when no such
/// orbit exists for this exponent.
std::optional<SymmetricSolution> find_symmetric_solution(double p);

/// Bisect the existence predicate between an exponent with a three-fold
/// orbit (p_exists) and one without (p_absent); returns the threshold within
/// tol. Throws std::invalid_argument unless the bracket is valid.
double bifurcation_point(double p_exists, double p_absent, double tol = 1e-3);

/// Outcome of matching a candidate against a reference solution.
struct CrossValidation {
  double scale = 1.0;     ///< kappa = lambda^{1/(p-2)} applied to the candidate
  double rotation = 0.0;  ///< aligning rotation angle
  double distance = 0.0;  ///< sup-norm distance after scaling and rotation
};

/// Rescale a normalized critical point (det W = lambda u^{p-1}) into the
/// lambda = 1 gauge, align its three-fold phase with the reference, and
/// report the sup distance. Throws std::invalid_argument for n != 1 or
/// mismatched exponents.
CrossValidation cross_validate(const SupportFunction& reference, double p_ref,
                               const SupportFunction& candidate, double p_cand, double lambda);

}  // namespace lpmk
