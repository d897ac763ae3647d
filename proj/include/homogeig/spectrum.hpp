#pragma once

#include <string>
#include <vector>

#include "homogeig/common.hpp"
#include "homogeig/problems.hpp"

namespace homogeig {

/// Eigenvalue flags.
inline constexpr const char* kFlagMultiple = "MULTIPLE";
/// Higher periodic value whose variational status is not established (p != 2).
inline constexpr const char* kFlagUncertain = "UNCERTAIN";

/// Ordered eigenvalues lambda_1 <= lambda_2 <= ... of one problem with the
/// metadata needed to compare and serialize them.
struct Spectrum {
  std::vector<double> values;
  /// Absolute error estimate per eigenvalue (final bracket width for
  /// shooting, residual- or extrapolation-based for finite elements).
  std::vector<double> errors;
  /// Per-eigenvalue residual of the discrete or shooting equations.
  std::vector<double> residuals;
  /// Per-eigenvalue flags, comma separated, empty when none.
  std::vector<std::string> flags;
  std::string solver;
  double tol = 0.0;
  BoundaryCondition bc;
  Scale epsilon;

  int size() const { return static_cast<int>(values.size()); }
  bool has_flag(int k, const std::string& flag) const;
  void add_flag(int k, const std::string& flag);
};

}  // namespace homogeig
