#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "homogeig/coefficients.hpp"
#include "support/random.hpp"

using namespace homogeig;

namespace {

CoefficientField halves() { return CoefficientField::piecewise({1.0, 3.0}); }

// Integral of a scaled field over [0,1]^2 by tensor Gauss on the grid of
// cells of size eps / cells, on which the field is smooth.
double integral_unit_square(const ScaledField& f, int per_axis) {
  using boost::math::quadrature::gauss;
  double total = 0.0;
  const double h = 1.0 / per_axis;
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j) {
      auto inner = [&](double x) {
        return gauss<double, 10>::integrate([&](double y) { return f(Point{x, y}); }, j * h,
                                            (j + 1) * h);
      };
      total += gauss<double, 10>::integrate(inner, i * h, (i + 1) * h);
    }
  return total;
}

}  // namespace

TEST_CASE("eval_scaled lookups") {
  CHECK(eval_scaled(ScaledField(CoefficientField::constant(2.0), 0.1), Point{0.77, 0.0}) == 2.0);
  CHECK(eval_scaled(ScaledField(halves(), 0.5), Point{0.3, 0.0}) == 3.0);
  CHECK(eval_scaled(ScaledField(halves(), kAveraged), Point{0.3, 0.0}) == 2.0);
}

TEST_CASE("cell averages") {
  CHECK(cell_average(CoefficientField::constant(5.0)) == 5.0);
  CHECK(cell_average(halves()) == 2.0);
  const auto trig = CoefficientField::trigonometric(1.0, {{0.5, 1, 0, true}});
  CHECK(cell_average(trig) == doctest::Approx(1.0).epsilon(1e-15));
  const auto shifted = CoefficientField::trigonometric(1.0, {{0.25, 0, 0, false}, {0.5, 2, 1, false}});
  CHECK(cell_average(shifted) == doctest::Approx(1.25));
}

TEST_CASE("periodicity sampling") {
  CHECK(sample_periodicity(CoefficientField::constant(3.0), 100) == 0.0);
  const auto trig = CoefficientField::trigonometric(
      2.0, {{0.5, 1, 0, true}, {0.3, 2, 3, false}, {0.1, 5, -1, true}});
  CHECK(sample_periodicity(trig, 100) <= 1e-12);
  CHECK(sample_periodicity(CoefficientField::piecewise({1, 2, 3, 4, 5, 6}, 3, 2), 100) <= 1e-12);
  CHECK_THROWS_AS(sample_periodicity(trig, 0), Error);
}

TEST_CASE("declared bounds are checked") {
  const auto trig = CoefficientField::trigonometric(1.0, {{0.5, 1, 0, true}});
  CHECK(trig.lo() == doctest::Approx(0.5));
  CHECK(trig.hi() == doctest::Approx(1.5));
  CHECK_NOTHROW(trig.with_bounds(0.4, 1.6));
  CHECK_THROWS_AS(trig.with_bounds(0.9, 1.6), Error);
  CHECK_THROWS_AS(halves().with_bounds(1.5, 3.0), Error);
}

TEST_CASE("ScaledField rejects bad epsilon") {
  CHECK_THROWS_AS(ScaledField(halves(), 0.0), Error);
  CHECK_THROWS_AS(ScaledField(halves(), -1.0), Error);
  ScaledField avg(halves(), kAveraged);
  CHECK(avg.averaged());
  CHECK(avg.lo() == 2.0);
  CHECK(avg.hi() == 2.0);
}

TEST_CASE("scaled breakpoints") {
  ScaledField f(halves(), 0.25);
  const auto bp = f.breakpoints(0, 0.0, 1.0);
  REQUIRE(bp.size() == 7);
  for (std::size_t i = 0; i < bp.size(); ++i) CHECK(bp[i] == doctest::Approx(0.125 * (i + 1)));
  CHECK(ScaledField(halves(), kAveraged).breakpoints(0, 0.0, 1.0).empty());
  CHECK(f.breakpoints(1, 0.0, 1.0).empty());
}

TEST_CASE("whole periods integrate to the cell average") {
  using boost::math::quadrature::gauss_kronrod;
  for (int m : {1, 2, 3, 8}) {
    const double eps = 1.0 / m;
    // 1D piecewise, split at the jumps.
    ScaledField f(CoefficientField::piecewise({1.0, 3.0, 0.5}), eps);
    std::vector<double> pts{0.0};
    for (double b : f.breakpoints(0, 0.0, 1.0)) pts.push_back(b);
    pts.push_back(1.0);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
      total += gauss_kronrod<double, 15>::integrate([&](double x) { return f(Point{x, 0.0}); },
                                                    pts[i], pts[i + 1]);
    CHECK(total == doctest::Approx(f.base().average()).epsilon(1e-10));

    ScaledField g(CoefficientField::trigonometric(2.0, {{0.7, 1, 2, true}, {0.4, 3, 0, false}}),
                  eps);
    CHECK(integral_unit_square(g, 4 * m) == doctest::Approx(2.0).epsilon(1e-10));

    ScaledField h(CoefficientField::piecewise({1, 2, 3, 4, 5, 6}, 3, 2), eps);
    CHECK(integral_unit_square(h, 6 * m) == doctest::Approx(3.5).epsilon(1e-10));
  }
}

TEST_CASE("property: cell_average is linear") {
  testsupport::Gen gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = gen.uniform(-3, 3), b = gen.uniform(-3, 3);
    const int nx1 = gen.integer(1, 4), ny1 = gen.integer(1, 3);
    const int nx2 = gen.integer(1, 4), ny2 = gen.integer(1, 3);
    const auto f = CoefficientField::piecewise(gen.values(nx1 * ny1, -2, 5), nx1, ny1);
    const auto g = CoefficientField::piecewise(gen.values(nx2 * ny2, -2, 5), nx2, ny2);
    const auto c = linear_combination(a, f, b, g);
    CHECK(std::abs(c.average() - (a * f.average() + b * g.average())) <= 1e-12);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const double a = gen.uniform(-3, 3), b = gen.uniform(-3, 3);
    const auto f = CoefficientField::trigonometric(
        gen.uniform(-1, 1), {{gen.uniform(-1, 1), gen.integer(0, 3), gen.integer(-2, 2), gen.coin()},
                             {gen.uniform(-1, 1), 0, 0, false}});
    const auto g = CoefficientField::trigonometric(gen.uniform(-1, 1),
                                                   {{gen.uniform(-1, 1), 1, 1, gen.coin()}});
    const auto c = linear_combination(a, f, b, g);
    CHECK(std::abs(c.average() - (a * f.average() + b * g.average())) <= 1e-12);
    const auto k = linear_combination(a, CoefficientField::constant(2.0), b, g);
    CHECK(std::abs(k.average() - (2.0 * a + b * g.average())) <= 1e-12);
  }
}

TEST_CASE("property: scaling identity eval(x, eps) = eval(x / 2, eps / 2)") {
  testsupport::Gen gen(12);
  const auto f = CoefficientField::piecewise(gen.values(12, 0.5, 4.0), 4, 3);
  const auto g = CoefficientField::trigonometric(1.0, {{0.3, 2, 1, true}, {0.2, 1, 3, false}});
  for (int trial = 0; trial < 200; ++trial) {
    const double eps = gen.log_uniform(1e-3, 1.0);
    const Point x{gen.uniform(0, 1), gen.uniform(0, 1)};
    const Point half{x.x / 2, x.y / 2};
    CHECK(ScaledField(f, eps)(x) == ScaledField(f, eps / 2)(half));
    CHECK(std::abs(ScaledField(g, eps)(x) - ScaledField(g, eps / 2)(half)) <= 1e-12);
  }
}
