#pragma once

#include <memory>
#include <vector>

#include "homogeig/problems.hpp"
#include "homogeig/ptrig.hpp"
#include "homogeig/spectrum.hpp"

namespace homogeig {

struct Solve1dOptions {
  /// Final bracket width relative to max(1, |lambda|).
  double tol = 1e-9;
  /// Largest eigenvalue the bracket search may reach.
  double lambda_cap = 1e12;
  /// Number of (x, theta) samples kept per eigenvalue; 0 keeps none.
  int phase_samples = 0;
};

/// One eigenvalue found by shooting, with what is needed to rebuild its
/// eigenfunction.
struct ShootingResult {
  int index = 0;
  double eigenvalue = 0.0;
  /// Number of half turns of the Pruefer angle, counted so that the
  /// eigenfunction has rotation_count - 1 interior zeros for separated
  /// conditions.
  int rotation_count = 0;
  double bracket_width = 0.0;
  /// Initial and terminal Pruefer angles and the scale s of the transform.
  double theta0 = 0.0;
  double theta_end = 0.0;
  double scale = 1.0;
  /// log r(L) - log r(0); zero for a periodic eigenfunction.
  double radial_residual = 0.0;
  std::vector<double> phase_x;
  std::vector<double> phase_theta;
  std::shared_ptr<const ProblemInstance> problem;
};

/// Eigenvalues 1..k_max of a one-dimensional problem with a Dirichlet,
/// Neumann or Robin condition (NonFlux is forwarded to solve_1d_nonflux).
///
/// With u = r sin_p(theta) and s A^{1/(p-1)} u' = r cos_p(theta) the
/// equation becomes
///   theta' = |cos_p|^p / (s A^{1/(p-1)}) + s^{p-1} (lambda rho - V) |sin_p|^p / (p-1),
/// whose terminal value theta(L; lambda) is increasing in lambda. The k-th
/// eigenvalue is the root of theta(L; lambda) = target_k, bracketed from
/// comparison bounds and refined with TOMS 748. The phase equation is
/// integrated with an adaptive Dormand-Prince 5(4) scheme restarted at
/// every coefficient jump.
///
/// Throws NO_CONVERGENCE(k) when no bracket exists below lambda_cap.
Spectrum solve_1d(const ProblemInstance& prob, int k_max, const Solve1dOptions& opts = {});
std::vector<ShootingResult> shoot_1d(const ProblemInstance& prob, int k_max,
                                     const Solve1dOptions& opts = {});

/// Periodic eigenvalues, i.e. the one-dimensional NonFlux problem.
///
/// The terminal angle defines a degree-one circle map
/// theta0 -> theta(L; theta0, lambda). With f = theta(L) - theta0, lambda_1 is
/// where min f reaches 0, and for j >= 1 the pair lambda_{2j} <= lambda_{2j+1}
/// is where max f and then min f reach 2 j pi_p. Coinciding pairs are
/// flagged MULTIPLE; for p != 2 values past lambda_1 are flagged UNCERTAIN,
/// and the radial mismatch log r(L) - log r(0) is reported as the residual.
Spectrum solve_1d_nonflux(const ProblemInstance& prob, int k_max, const Solve1dOptions& opts = {});
std::vector<ShootingResult> shoot_1d_nonflux(const ProblemInstance& prob, int k_max,
                                             const Solve1dOptions& opts = {});

/// Rebuilds the eigenfunction on n_points uniform nodes, normalized to
/// F(u, rho) = 1 with u'(0) >= 0 (u(0) > 0 when u'(0) = 0). The periodic
/// ground state is returned positive.
DiscreteFunction eigenfunction_1d(const ShootingResult& result, int n_points);

}  // namespace homogeig
