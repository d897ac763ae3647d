#pragma once

#include <vector>

namespace homogeig {

/// Least-squares line log y = intercept + slope log x.
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Coefficient of determination; 1 when the points are collinear.
  double r2 = 0.0;
  int points = 0;
  /// exp(intercept), the constant C of y ~ C x^slope.
  double constant() const;
};

/// Throws INVALID_ARGUMENT unless there are >= 2 points with distinct x
/// and all coordinates are positive. The result does not depend on the
/// order of the points.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace homogeig
