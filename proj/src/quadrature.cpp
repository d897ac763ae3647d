#include "homogeig/quadrature.hpp"

namespace homogeig {

void Resolution::add(const ScaledField& f) {
  if (f.averaged() || f.base().is_constant()) return;
  if (f.base().kind() == FieldKind::Piecewise) {
    piecewise_.push_back(f);
  } else {
    add_cut_size(*f.epsilon() / 8.0);
  }
}

void Resolution::add(const SpatialField& f) {
  if (const CoefficientField* field = f.field()) add(ScaledField(*field, 1.0));
}

std::vector<double> Resolution::cuts(int axis, double a, double b) const {
  std::vector<double> out;
  for (const auto& f : piecewise_) {
    const auto more = f.breakpoints(axis, a, b);
    out.insert(out.end(), more.begin(), more.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace detail {

void split_polygon(const Polygon& poly, int axis, double c, std::vector<Polygon>& out) {
  Polygon below, above;
  const std::size_t n = poly.v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = poly.v[i];
    const Point q = poly.v[(i + 1) % n];
    const double sp = coord(p, axis) - c;
    const double sq = coord(q, axis) - c;
    if (sp <= 0) below.v.push_back(p);
    if (sp >= 0) above.v.push_back(p);
    if ((sp < 0 && sq > 0) || (sp > 0 && sq < 0)) {
      const double t = sp / (sp - sq);
      Point x{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
      if (axis == 0) x.x = c; else x.y = c;
      below.v.push_back(x);
      above.v.push_back(x);
    }
  }
  if (below.v.size() >= 3) out.push_back(std::move(below));
  if (above.v.size() >= 3) out.push_back(std::move(above));
}

const TriangleRule& triangle_rule() {
  static const TriangleRule rule = [] {
    const double s = std::sqrt(15.0);
    const double a1 = (6.0 - s) / 21.0, b1 = (9.0 + 2.0 * s) / 21.0;
    const double a2 = (6.0 + s) / 21.0, b2 = (9.0 - 2.0 * s) / 21.0;
    const double w1 = (155.0 - s) / 1200.0, w2 = (155.0 + s) / 1200.0;
    TriangleRule r;
    r.nodes = {{{1.0 / 3, 1.0 / 3, 1.0 / 3},
                {a1, a1, b1}, {a1, b1, a1}, {b1, a1, a1},
                {a2, a2, b2}, {a2, b2, a2}, {b2, a2, a2}}};
    r.weights = {9.0 / 40, w1, w1, w1, w2, w2, w2};
    return r;
  }();
  return rule;
}

}  // namespace detail
}  // namespace homogeig
