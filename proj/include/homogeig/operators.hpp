#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "homogeig/coefficients.hpp"
#include "homogeig/common.hpp"

namespace homogeig {

/// Symmetric 2x2 matrix [[a11, a12], [a12, a22]].
struct Matrix2 {
  double a11 = 1.0;
  double a12 = 0.0;
  double a22 = 1.0;

  Vec2 operator*(Vec2 v) const { return {a11 * v.x + a12 * v.y, a12 * v.x + a22 * v.y}; }
};

/// The prototype diffusion law a(x, xi) = A(x) |xi|^{p-2} xi with
/// ellipticity bounds 0 < alpha <= beta.
///
/// A is either a positive scalar field (any p > 1) or a symmetric positive
/// definite matrix field. A non-scalar matrix is only accepted for p = 2,
/// since A(x)|xi|^{p-2}xi is not a gradient field otherwise.
class OperatorSpec {
 public:
  static OperatorSpec scalar(double p, SpatialField a, double alpha, double beta);
  static OperatorSpec matrix(SpatialField a11, SpatialField a12, SpatialField a22, double alpha,
                             double beta);
  /// The p-Laplacian, A = 1, alpha = beta = 1.
  static OperatorSpec p_laplacian(double p);

  double p() const { return p_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  bool is_matrix() const { return matrix_; }

  /// Scalar coefficient A(x); throws INVALID_ARGUMENT for matrix operators.
  double coefficient(Point x) const;
  /// A(x) as a matrix (A(x) I for scalar operators).
  Matrix2 matrix_coefficient(Point x) const;
  const SpatialField& scalar_field() const { return a11_; }
  /// All spatial fields the law depends on (one, or three for a matrix).
  std::vector<const SpatialField*> fields() const;

  Vec2 apply(Point x, Vec2 xi) const;
  /// Phi(x, xi), the even p-homogeneous potential with grad Phi = p a.
  double potential(Point x, Vec2 xi) const;

  /// Coefficient jump locations strictly inside (a, b) along an axis.
  std::vector<double> breakpoints(int axis, double a, double b) const;

 private:
  OperatorSpec() = default;

  double p_ = 2.0;
  double alpha_ = 1.0;
  double beta_ = 1.0;
  bool matrix_ = false;
  SpatialField a11_{1.0};
  SpatialField a12_{0.0};
  SpatialField a22_{1.0};
};

Vec2 apply(const OperatorSpec& op, Point x, Vec2 xi);
double potential(const OperatorSpec& op, Point x, Vec2 xi);

/// A general flux law x, xi -> a(x, xi) with its claimed constants, the
/// input of the hypothesis checker. Lets callers test operators outside the
/// prototype family.
struct DiffusionLaw {
  int dimension = 1;
  double p = 2.0;
  double alpha = 1.0;
  double beta = 1.0;
  std::function<Vec2(Point, Vec2)> flux;
};

DiffusionLaw diffusion_law(const OperatorSpec& op, int dimension);

/// Worst sampled violation per hypothesis, each normalized to be
/// scale-free and clamped at zero when the hypothesis holds.
struct HypothesisReport {
  int samples = 0;
  double h1_monotonicity = 0.0;
  double h2_coercivity = 0.0;
  double h3_continuity = 0.0;
  double h4_homogeneity = 0.0;
  double h5_oddness = 0.0;
  /// Cyclical monotonicity, k = 2 instance only (coincides with H1).
  double h7_cyclic = 0.0;
  /// max(0, -alpha8) where alpha8 is the smallest sampled strict-monotonicity
  /// ratio with gamma = max(2, p).
  double h8_strict = 0.0;
  double h8_alpha_estimate = 0.0;
  /// Equi-continuity ratio statistics; the constant is not prescribed so
  /// these are reported only.
  double h6_ratio_max = 0.0;
  double h6_ratio_median = 0.0;
  /// Measurability cannot be sampled; recorded as satisfied.
  bool h0_vacuous = true;

  /// Hypotheses whose residual exceeds `threshold`, in checking order
  /// H5, H4, H1, H2, H3, H8.
  std::vector<std::string> failing(double threshold = 1e-6) const;
};

/// Deterministic given `seed`. Points x are drawn uniformly in the domain,
/// vectors xi with log-uniform magnitudes in [1e-2, 1e2].
HypothesisReport sample_hypotheses(const DiffusionLaw& law, const Domain& domain, int n_samples,
                                   std::uint64_t seed);

class HypothesisRejected : public Error {
 public:
  HypothesisRejected(std::string hypothesis, HypothesisReport report);
  const std::string& hypothesis() const { return hypothesis_; }
  const HypothesisReport& report() const { return report_; }

 private:
  std::string hypothesis_;
  HypothesisReport report_;
};

/// Like sample_hypotheses, but throws HypothesisRejected (code REJECTED)
/// naming the first failing hypothesis when any residual exceeds 1e-6.
HypothesisReport check_hypotheses(const DiffusionLaw& law, const Domain& domain, int n_samples,
                                  std::uint64_t seed);
HypothesisReport check_hypotheses(const OperatorSpec& op, const Domain& domain, int n_samples,
                                  std::uint64_t seed);

}  // namespace homogeig
