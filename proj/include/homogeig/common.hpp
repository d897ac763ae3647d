#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace homogeig {

/// A point of R^N, N in {1, 2}. One-dimensional code ignores `y`.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// A vector of R^N, N in {1, 2}; used for gradients and fluxes.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double t, Vec2 a) { return {t * a.x, t * a.y}; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// The scale parameter of an oscillating coefficient. An empty value stands
/// for the averaged (homogenized) limit.
using Scale = std::optional<double>;
inline constexpr std::nullopt_t kAveraged = std::nullopt;

std::string scale_label(const Scale& eps);

enum class ErrorCode {
  InvalidArgument,
  NoConvergence,
  ZeroDenominator,
  MeshTooCoarse,
  SingularPencil,
  DegenerateFit,
  Rejected,
  Config,
};

const char* to_string(ErrorCode code);

/// Library-wide exception. `what()` carries the code name followed by a
/// human-readable detail, e.g. "NO_CONVERGENCE(3): bracket exceeds lambda_cap".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);
  /// Error tied to one eigenvalue index or hypothesis number.
  Error(ErrorCode code, int index, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  /// The index given at construction, or 0.
  int index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::string detail_;
  int index_ = 0;
};

/// Axis-aligned domain anchored at the origin: (0, lx) for N = 1, or
/// (0, lx) x (0, ly) for N = 2.
class Domain {
 public:
  static Domain interval(double length);
  static Domain rectangle(double width, double height);

  int dimension() const { return dim_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double measure() const { return dim_ == 1 ? lx_ : lx_ * ly_; }
  /// Length of the boundary in 2D, number of boundary points (2) in 1D.
  double boundary_measure() const { return dim_ == 1 ? 2.0 : 2.0 * (lx_ + ly_); }

 private:
  Domain(int dim, double lx, double ly) : dim_(dim), lx_(lx), ly_(ly) {}
  int dim_;
  double lx_;
  double ly_;
};

}  // namespace homogeig
