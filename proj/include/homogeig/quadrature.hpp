#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "homogeig/coefficients.hpp"
#include "homogeig/common.hpp"

namespace homogeig {

/// Collects the fields an integrand depends on and tells a quadrature how
/// finely it must cut the integration region: exactly at the jumps of
/// piecewise fields, and into pieces of size at most `h_smooth` where a
/// smooth field oscillates.
class Resolution {
 public:
  void add(const ScaledField& f);
  void add(const SpatialField& f);
  void add_cut_size(double h) { h_smooth_ = std::min(h_smooth_, h); }

  /// Jump locations strictly inside (a, b) along an axis, sorted.
  std::vector<double> cuts(int axis, double a, double b) const;
  double h_smooth() const { return h_smooth_; }

 private:
  std::vector<ScaledField> piecewise_;
  double h_smooth_ = INFINITY;
};

namespace detail {

struct Polygon {
  std::vector<Point> v;
};

/// Splits a convex polygon by the line coord(axis) = c.
void split_polygon(const Polygon& poly, int axis, double c, std::vector<Polygon>& out);

inline double coord(Point p, int axis) { return axis == 0 ? p.x : p.y; }

// Seven-point degree-5 rule on the reference triangle, barycentric nodes
// and weights summing to one.
struct TriangleRule {
  std::array<std::array<double, 3>, 7> nodes;
  std::array<double, 7> weights;
};
const TriangleRule& triangle_rule();

template <class Visit>
void triangle_nodes(Point a, Point b, Point c, double h, Visit& visit, int depth) {
  const double d = std::max({std::hypot(b.x - a.x, b.y - a.y), std::hypot(c.x - b.x, c.y - b.y),
                             std::hypot(a.x - c.x, a.y - c.y)});
  if (d > h && depth < 12) {
    const Point ab{(a.x + b.x) / 2, (a.y + b.y) / 2};
    const Point bc{(b.x + c.x) / 2, (b.y + c.y) / 2};
    const Point ca{(c.x + a.x) / 2, (c.y + a.y) / 2};
    triangle_nodes(a, ab, ca, h, visit, depth + 1);
    triangle_nodes(ab, b, bc, h, visit, depth + 1);
    triangle_nodes(ca, bc, c, h, visit, depth + 1);
    triangle_nodes(ab, bc, ca, h, visit, depth + 1);
    return;
  }
  const double area = 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
  const TriangleRule& rule = triangle_rule();
  for (std::size_t q = 0; q < rule.weights.size(); ++q) {
    const auto& l = rule.nodes[q];
    visit(Point{l[0] * a.x + l[1] * b.x + l[2] * c.x, l[0] * a.y + l[1] * b.y + l[2] * c.y},
          rule.weights[q] * area);
  }
}

}  // namespace detail

/// Calls visit(x, w) for the nodes of a composite 10-point Gauss rule on
/// [a, b]: split at the resolution's jumps and `extra` cuts, then into
/// pieces no longer than the smooth cut size. Exact for polynomials of
/// degree 19 on each piece.
template <class Visit>
void quadrature_interval(double a, double b, const Resolution& res, const std::vector<double>& extra,
                         Visit&& visit) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  std::vector<double> pts = res.cuts(0, a, b);
  for (double e : extra)
    if (e > a && e < b) pts.push_back(e);
  pts.push_back(a);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double len = pts[i + 1] - pts[i];
    if (len <= 0.0) continue;
    const int pieces = std::isfinite(res.h_smooth()) ? std::max(1, static_cast<int>(std::ceil(len / res.h_smooth()))) : 1;
    const double h = len / pieces;
    for (int s = 0; s < pieces; ++s) {
      const double mid = pts[i] + (s + 0.5) * h;
      const double half = 0.5 * h;
      for (std::size_t q = 0; q < xs.size(); ++q) {
        visit(mid - half * xs[q], half * ws[q]);
        visit(mid + half * xs[q], half * ws[q]);
      }
    }
  }
}

/// Calls visit(x, w) for a composite rule on the triangle abc: the triangle
/// is clipped exactly along the resolution's jump lines, the convex pieces
/// are fan-triangulated and refined to the smooth cut size, and each leaf
/// gets the seven-point degree-5 rule.
template <class Visit>
void quadrature_triangle(Point a, Point b, Point c, const Resolution& res, Visit&& visit) {
  std::vector<detail::Polygon> polys{{{a, b, c}}};
  for (int axis = 0; axis < 2; ++axis) {
    const double lo = std::min({detail::coord(a, axis), detail::coord(b, axis), detail::coord(c, axis)});
    const double hi = std::max({detail::coord(a, axis), detail::coord(b, axis), detail::coord(c, axis)});
    for (double cut : res.cuts(axis, lo, hi)) {
      std::vector<detail::Polygon> next;
      for (const auto& poly : polys) detail::split_polygon(poly, axis, cut, next);
      polys.swap(next);
    }
  }
  for (const auto& poly : polys)
    for (std::size_t i = 1; i + 1 < poly.v.size(); ++i)
      detail::triangle_nodes(poly.v[0], poly.v[i], poly.v[i + 1], res.h_smooth(), visit, 0);
}

}  // namespace homogeig
