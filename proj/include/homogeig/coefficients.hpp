#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "homogeig/common.hpp"

namespace homogeig {

enum class FieldKind { Constant, Piecewise, Trigonometric };

/// One term a * cos(2 pi (kx y1 + ky y2)) or a * sin(...) of a trigonometric
/// field. Integer frequencies keep the field Q-periodic.
struct TrigTerm {
  double amplitude = 0.0;
  int kx = 0;
  int ky = 0;
  bool sine = false;
};

/// A bounded Q-periodic scalar field on R^N (Q the unit cell), used for
/// weights, potentials and diffusion scalars.
///
/// Piecewise fields are constant on the cells of a uniform nx-by-ny grid of
/// Q; `values` is row-major with the x index fastest. A 1D piecewise field is
/// the ny = 1 case and does not depend on y.
///
/// Declared bounds are checked on a dense sample when they are set; a
/// violation throws INVALID_ARGUMENT.
class CoefficientField {
 public:
  static CoefficientField constant(double value);
  static CoefficientField piecewise(std::vector<double> values);
  static CoefficientField piecewise(std::vector<double> values, int nx, int ny);
  static CoefficientField trigonometric(double mean, std::vector<TrigTerm> terms);

  /// Copy with declared bounds [lo, hi].
  CoefficientField with_bounds(double lo, double hi) const;

  double operator()(Point y) const;

  FieldKind kind() const { return kind_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  /// Exact integral over the unit cell.
  double average() const;
  bool is_constant() const;

  /// Cell count of the piecewise grid along an axis (0 = x, 1 = y); 1 for
  /// the smooth kinds.
  int grid_cells(int axis) const;
  /// Jump locations in [0, 1) along an axis; empty for smooth kinds.
  std::vector<double> breakpoints(int axis) const;

  const std::vector<double>& values() const { return values_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }
  double mean() const { return mean_; }

 private:
  CoefficientField() = default;
  void check_bounds() const;

  FieldKind kind_ = FieldKind::Constant;
  double mean_ = 0.0;  // constant value, or trigonometric constant term
  std::vector<double> values_;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<TrigTerm> terms_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// a f + b g for fields of compatible kinds. Constant fields combine with
/// anything; piecewise fields are merged on the common refinement of their
/// grids; trigonometric fields concatenate their terms. Mixing piecewise
/// and trigonometric throws INVALID_ARGUMENT.
CoefficientField linear_combination(double a, const CoefficientField& f, double b,
                                    const CoefficientField& g);

/// The field x -> base(x / eps), or its cell average for the averaged limit.
class ScaledField {
 public:
  ScaledField(CoefficientField base, Scale eps);

  double operator()(Point x) const;

  const CoefficientField& base() const { return base_; }
  const Scale& epsilon() const { return eps_; }
  bool averaged() const { return !eps_.has_value(); }
  /// Bounds of the values actually taken.
  double lo() const;
  double hi() const;
  /// Jump locations of the scaled field strictly inside (a, b) along an axis.
  std::vector<double> breakpoints(int axis, double a, double b) const;

 private:
  CoefficientField base_;
  Scale eps_;
};

double eval_scaled(const ScaledField& f, Point x);
double cell_average(const CoefficientField& f);
/// Largest |f(y + e_i) - f(y)| over n seeded random points y in Q and both
/// unit vectors.
double sample_periodicity(const CoefficientField& f, int n, std::uint64_t seed = 1);

/// Scalar spatial coefficient over the physical domain (the diffusion scalar
/// or a matrix entry). Backed either by an unscaled periodic field or by an
/// arbitrary callable with declared bounds.
class SpatialField {
 public:
  SpatialField(double value);  // NOLINT(google-explicit-constructor)
  SpatialField(CoefficientField field);  // NOLINT(google-explicit-constructor)
  SpatialField(std::function<double(Point)> fn, double lo, double hi);

  double operator()(Point x) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool is_constant() const;
  /// Jumps strictly inside (a, b) along an axis (periodic-field case only).
  std::vector<double> breakpoints(int axis, double a, double b) const;
  const CoefficientField* field() const { return field_ ? &*field_ : nullptr; }

 private:
  std::optional<CoefficientField> field_;
  std::function<double(Point)> fn_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

}  // namespace homogeig
