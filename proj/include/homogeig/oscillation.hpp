#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "homogeig/coefficients.hpp"
#include "homogeig/common.hpp"
#include "homogeig/problems.hpp"

namespace homogeig {

enum class TraceSpace { ZeroTrace, FreeTrace };
enum class TestFamily { Bumps, Eigenfunctions, RandomPiecewiseLinear, Mixed };

const char* to_string(TraceSpace space);
const char* to_string(TestFamily family);
TraceSpace parse_trace_space(const std::string& name);
TestFamily parse_test_family(const std::string& name);

/// Setup for measuring |int (g(x/eps) - mean g) |u|^p| over a family of
/// test functions u.
struct OscillationProbe {
  CoefficientField g = CoefficientField::constant(0.0);
  Domain domain = Domain::interval(1.0);
  double p = 2.0;
  TraceSpace space = TraceSpace::ZeroTrace;
  TestFamily family = TestFamily::Mixed;
  std::uint64_t seed = 1;
  int family_size = 32;
};

/// The seeded test functions of the probe, all continuous and piecewise
/// linear, with zero trace when the probe asks for it:
///   Bumps           smooth bumps interpolated on a fine mesh; the free-trace
///                   variant adds an affine part that is nonzero on the boundary
///   Eigenfunctions  Dirichlet (zero trace) or Neumann (free trace) modes of
///                   the constant-coefficient problem, by shooting in 1D and
///                   finite elements (p = 2) in 2D
///   RandomPiecewiseLinear  random nodal values on a coarse random mesh
///   Mixed           the three families in turn
/// Deterministic given the probe.
std::vector<DiscreteFunction> test_family(const OscillationProbe& probe);

/// |int_Omega (g(x/eps) - mean g) |u|^p|, integrated cell by cell with the
/// cells cut at every jump of g, so it is exact for piecewise-constant g and
/// p = 2. Zero for constant g.
double oscillation_gap(const OscillationProbe& probe, const DiscreteFunction& u, double eps);

/// The gap over eps times |grad u|_p^p (zero trace) or times the W^{1,1}
/// norm of |u|^p (free trace): an empirical lower bound for the constant C
/// of the estimate gap <= C eps (...). Throws ZERO_DENOMINATOR when the
/// normalization vanishes, e.g. for constant u in the zero-trace form.
double oscillation_ratio(const OscillationProbe& probe, const DiscreteFunction& u, double eps);

/// Smallest c with
///   F(u, mean rho) / F(u, rho_eps) <= 1 + c eps (F(u, mean V) + G(u)) / F(u, mean rho)
/// for the weights and operator of `prob` at its scale; negative when the
/// left side is below one. Throws INVALID_ARGUMENT for the averaged scale and
/// ZERO_DENOMINATOR when F(u, mean V) + G(u) vanishes.
double averaging_constant(const DiscreteFunction& u, const ProblemInstance& prob);

struct OscillationFit {
  std::vector<double> eps;
  /// Largest gap over the family at each eps.
  std::vector<double> max_gap;
  /// Largest ratio over the family at each eps (functions with a vanishing
  /// normalization are skipped).
  std::vector<double> max_ratio;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  /// exp(intercept).
  double constant = 0.0;
};

/// Largest gap and ratio over the probe's family at each eps (sorted
/// decreasing, geometric), without a fit; slope, intercept, r2 and constant
/// stay zero.
OscillationFit oscillation_gaps(const OscillationProbe& probe, const std::vector<double>& eps_list, int jobs = 1);

/// Least-squares slope of log max-gap against log eps over the probe's
/// family. Needs >= 4 eps values forming a geometric sequence. A finite
/// family only bounds the constant from below. Throws DEGENERATE_FIT when
/// every gap is below 1e-13.
OscillationFit fit_oscillation_rate(const OscillationProbe& probe, const std::vector<double>& eps_list,
                                    int jobs = 1);

}  // namespace homogeig
