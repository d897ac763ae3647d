#include "homogeig/coefficients.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <random>

namespace homogeig {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double y) { return y - std::floor(y); }

int cell_index(double y, int n) {
  const int i = static_cast<int>(frac(y) * n);
  return std::clamp(i, 0, n - 1);
}

}  // namespace

CoefficientField CoefficientField::constant(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::InvalidArgument, "constant field must be finite");
  CoefficientField f;
  f.kind_ = FieldKind::Constant;
  f.mean_ = value;
  f.lo_ = f.hi_ = value;
  return f;
}

CoefficientField CoefficientField::piecewise(std::vector<double> values) {
  const int n = static_cast<int>(values.size());
  return piecewise(std::move(values), n, 1);
}

CoefficientField CoefficientField::piecewise(std::vector<double> values, int nx, int ny) {
  if (nx < 1 || ny < 1 || values.size() != static_cast<std::size_t>(nx) * ny)
    throw Error(ErrorCode::InvalidArgument, "piecewise field needs nx*ny values");
  for (double v : values)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "piecewise values must be finite");
  CoefficientField f;
  f.kind_ = FieldKind::Piecewise;
  f.values_ = std::move(values);
  f.nx_ = nx;
  f.ny_ = ny;
  const auto [mn, mx] = std::minmax_element(f.values_.begin(), f.values_.end());
  f.lo_ = *mn;
  f.hi_ = *mx;
  return f;
}

CoefficientField CoefficientField::trigonometric(double mean, std::vector<TrigTerm> terms) {
  if (!std::isfinite(mean)) throw Error(ErrorCode::InvalidArgument, "trigonometric mean must be finite");
  CoefficientField f;
  f.kind_ = FieldKind::Trigonometric;
  f.mean_ = mean;
  f.terms_ = std::move(terms);
  double spread = 0.0;
  double shift = 0.0;
  for (const auto& t : f.terms_) {
    if (!std::isfinite(t.amplitude))
      throw Error(ErrorCode::InvalidArgument, "trigonometric amplitude must be finite");
    if (t.kx == 0 && t.ky == 0) {
      if (!t.sine) shift += t.amplitude;
    } else {
      spread += std::abs(t.amplitude);
    }
  }
  f.lo_ = mean + shift - spread;
  f.hi_ = mean + shift + spread;
  return f;
}

CoefficientField CoefficientField::with_bounds(double lo, double hi) const {
  if (!(lo <= hi)) throw Error(ErrorCode::InvalidArgument, "field bounds need lo <= hi");
  CoefficientField f = *this;
  f.lo_ = lo;
  f.hi_ = hi;
  f.check_bounds();
  return f;
}

void CoefficientField::check_bounds() const {
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo_), std::abs(hi_)));
  auto check = [&](double v) {
    if (v < lo_ - slack || v > hi_ + slack)
      throw Error(ErrorCode::InvalidArgument,
                  "field value " + std::to_string(v) + " outside declared bounds [" +
                      std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
  };
  switch (kind_) {
    case FieldKind::Constant:
      check(mean_);
      return;
    case FieldKind::Piecewise:
      for (double v : values_) check(v);
      return;
    case FieldKind::Trigonometric: {
      constexpr int kGrid = 97;
      for (int i = 0; i < kGrid; ++i)
        for (int j = 0; j < kGrid; ++j) check((*this)(Point{double(i) / kGrid, double(j) / kGrid}));
      std::mt19937_64 rng(7);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int i = 0; i < 4096; ++i) check((*this)(Point{u(rng), u(rng)}));
      return;
    }
  }
}

double CoefficientField::operator()(Point y) const {
  switch (kind_) {
    case FieldKind::Constant:
      return mean_;
    case FieldKind::Piecewise: {
      const int i = cell_index(y.x, nx_);
      const int j = ny_ == 1 ? 0 : cell_index(y.y, ny_);
      return values_[static_cast<std::size_t>(j) * nx_ + i];
    }
    case FieldKind::Trigonometric: {
      double v = mean_;
      for (const auto& t : terms_) {
        // Reduce the phase before scaling so that y and y + 1 give the same
        // argument up to rounding of the fractional part.
        const double phase = kTwoPi * (t.kx * frac(y.x) + t.ky * frac(y.y));
        v += t.amplitude * (t.sine ? std::sin(phase) : std::cos(phase));
      }
      return v;
    }
  }
  return 0.0;
}

double CoefficientField::average() const {
  switch (kind_) {
    case FieldKind::Constant:
      return mean_;
    case FieldKind::Piecewise:
      return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
    case FieldKind::Trigonometric: {
      double v = mean_;
      for (const auto& t : terms_)
        if (t.kx == 0 && t.ky == 0 && !t.sine) v += t.amplitude;
      return v;
    }
  }
  return 0.0;
}

bool CoefficientField::is_constant() const {
  switch (kind_) {
    case FieldKind::Constant:
      return true;
    case FieldKind::Piecewise:
      return std::all_of(values_.begin(), values_.end(), [&](double v) { return v == values_.front(); });
    case FieldKind::Trigonometric:
      return std::all_of(terms_.begin(), terms_.end(), [](const TrigTerm& t) {
        return t.amplitude == 0.0 || (t.kx == 0 && t.ky == 0);
      });
  }
  return false;
}

int CoefficientField::grid_cells(int axis) const {
  if (kind_ != FieldKind::Piecewise) return 1;
  return axis == 0 ? nx_ : ny_;
}

std::vector<double> CoefficientField::breakpoints(int axis) const {
  std::vector<double> out;
  if (kind_ != FieldKind::Piecewise) return out;
  const int n = grid_cells(axis);
  if (n == 1) return out;
  for (int i = 0; i < n; ++i) out.push_back(static_cast<double>(i) / n);
  return out;
}

CoefficientField linear_combination(double a, const CoefficientField& f, double b,
                                    const CoefficientField& g) {
  if (f.kind() == FieldKind::Constant && g.kind() == FieldKind::Constant)
    return CoefficientField::constant(a * f.average() + b * g.average());
  if (g.kind() == FieldKind::Constant) return linear_combination(b, g, a, f);
  // From here on g is not constant.
  if (f.kind() == FieldKind::Constant) {
    const double c = a * f.average();
    if (g.kind() == FieldKind::Piecewise) {
      std::vector<double> v = g.values();
      for (double& x : v) x = c + b * x;
      return CoefficientField::piecewise(std::move(v), g.grid_cells(0), g.grid_cells(1));
    }
    std::vector<TrigTerm> terms = g.terms();
    for (auto& t : terms) t.amplitude *= b;
    return CoefficientField::trigonometric(c + b * g.mean(), std::move(terms));
  }
  if (f.kind() != g.kind())
    throw Error(ErrorCode::InvalidArgument, "cannot combine piecewise and trigonometric fields");
  if (f.kind() == FieldKind::Trigonometric) {
    std::vector<TrigTerm> terms;
    for (auto t : f.terms()) {
      t.amplitude *= a;
      terms.push_back(t);
    }
    for (auto t : g.terms()) {
      t.amplitude *= b;
      terms.push_back(t);
    }
    return CoefficientField::trigonometric(a * f.mean() + b * g.mean(), std::move(terms));
  }
  const int nx = std::lcm(f.grid_cells(0), g.grid_cells(0));
  const int ny = std::lcm(f.grid_cells(1), g.grid_cells(1));
  std::vector<double> v(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Point c{(i + 0.5) / nx, (j + 0.5) / ny};
      v[static_cast<std::size_t>(j) * nx + i] = a * f(c) + b * g(c);
    }
  return CoefficientField::piecewise(std::move(v), nx, ny);
}

ScaledField::ScaledField(CoefficientField base, Scale eps) : base_(std::move(base)), eps_(eps) {
  if (eps_ && !(*eps_ > 0.0 && std::isfinite(*eps_)))
    throw Error(ErrorCode::InvalidArgument, "epsilon must be positive or averaged");
}

double ScaledField::operator()(Point x) const {
  if (!eps_) return base_.average();
  return base_(Point{x.x / *eps_, x.y / *eps_});
}

double ScaledField::lo() const { return eps_ ? base_.lo() : base_.average(); }
double ScaledField::hi() const { return eps_ ? base_.hi() : base_.average(); }

std::vector<double> ScaledField::breakpoints(int axis, double a, double b) const {
  std::vector<double> out;
  if (!eps_ || base_.is_constant()) return out;
  const std::vector<double> cell = base_.breakpoints(axis);
  if (cell.empty()) return out;
  const double eps = *eps_;
  const long first = static_cast<long>(std::floor(a / eps)) - 1;
  const long last = static_cast<long>(std::ceil(b / eps)) + 1;
  const double snap = 1e-12 * std::max(1.0, std::abs(b - a));
  for (long m = first; m <= last; ++m)
    for (double c : cell) {
      const double x = eps * (static_cast<double>(m) + c);
      if (x > a + snap && x < b - snap) out.push_back(x);
    }
  std::sort(out.begin(), out.end());
  return out;
}

double eval_scaled(const ScaledField& f, Point x) { return f(x); }

double cell_average(const CoefficientField& f) { return f.average(); }

double sample_periodicity(const CoefficientField& f, int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const Point y{u(rng), u(rng)};
    const double v = f(y);
    worst = std::max(worst, std::abs(f(Point{y.x + 1.0, y.y}) - v));
    worst = std::max(worst, std::abs(f(Point{y.x, y.y + 1.0}) - v));
  }
  return worst;
}

SpatialField::SpatialField(double value)
    : field_(CoefficientField::constant(value)), lo_(value), hi_(value) {}

SpatialField::SpatialField(CoefficientField field)
    : field_(std::move(field)), lo_(field_->lo()), hi_(field_->hi()) {}

SpatialField::SpatialField(std::function<double(Point)> fn, double lo, double hi)
    : fn_(std::move(fn)), lo_(lo), hi_(hi) {
  if (!fn_) throw Error(ErrorCode::InvalidArgument, "spatial field needs a callable");
  if (!(lo <= hi)) throw Error(ErrorCode::InvalidArgument, "spatial field bounds need lo <= hi");
}

double SpatialField::operator()(Point x) const { return field_ ? (*field_)(x) : fn_(x); }

bool SpatialField::is_constant() const { return field_ && field_->is_constant(); }

std::vector<double> SpatialField::breakpoints(int axis, double a, double b) const {
  if (!field_) return {};
  return ScaledField(*field_, 1.0).breakpoints(axis, a, b);
}

}  // namespace homogeig
