#include <cmath>

#include "doctest.h"
#include "homogeig/operators.hpp"
#include "support/random.hpp"

using namespace homogeig;

namespace {

OperatorSpec smooth_p3() {
  // A(x) = 1 + x1^2 / (1 + x1^2) takes values in [1, 2).
  SpatialField a([](Point x) { return 1.0 + x.x * x.x / (1.0 + x.x * x.x); }, 1.0, 2.0);
  return OperatorSpec::scalar(3.0, a, 1.0, 2.0);
}

}  // namespace

TEST_CASE("apply closed forms") {
  const auto lap = OperatorSpec::matrix(1.0, 0.0, 1.0, 1.0, 1.0);
  const Vec2 r = apply(lap, Point{}, Vec2{3, 4});
  CHECK(r.x == 3.0);
  CHECK(r.y == 4.0);
  const auto p4 = OperatorSpec::scalar(4.0, 2.0, 1.0, 2.0);
  CHECK(apply(p4, Point{}, Vec2{3, 0}).x == doctest::Approx(54.0));
  for (double p : {1.2, 2.0, 3.5}) {
    const Vec2 z = apply(OperatorSpec::p_laplacian(p), Point{}, Vec2{});
    CHECK(z.x == 0.0);
    CHECK(z.y == 0.0);
  }
}

TEST_CASE("potential closed forms") {
  CHECK(potential(OperatorSpec::p_laplacian(2.0), Point{}, Vec2{1, 1}) == doctest::Approx(2.0));
  CHECK(potential(OperatorSpec::scalar(3.0, 2.0, 1.0, 2.0), Point{}, Vec2{-2, 0}) ==
        doctest::Approx(16.0));
  const auto m = OperatorSpec::matrix(2.0, 0.5, 1.0, 0.5, 3.0);
  CHECK(potential(m, Point{}, Vec2{1, 2}) == doctest::Approx(2.0 + 2 * 0.5 * 2 + 4.0));
}

TEST_CASE("construction rejects bad parameters") {
  CHECK_THROWS_AS(OperatorSpec::p_laplacian(1.0), Error);
  CHECK_THROWS_AS(OperatorSpec::scalar(2.0, 1.0, 2.0, 1.0), Error);
  CHECK_THROWS_AS(OperatorSpec::scalar(2.0, 3.0, 1.0, 2.0), Error);
  CHECK_THROWS_AS(OperatorSpec::matrix(1.0, 0.0, 1.0, 0.0, 1.0), Error);
  CHECK(OperatorSpec::matrix(1.0, 0.0, 1.0, 1.0, 1.0).p() == 2.0);
}

TEST_CASE("gradient of the potential is p times the flux") {
  testsupport::Gen gen(21);
  const double h = 1e-5;
  for (const auto& op : {smooth_p3(), OperatorSpec::p_laplacian(1.5), OperatorSpec::matrix(2.0, 0.3, 1.0, 0.5, 3.0)}) {
    for (int i = 0; i < 20; ++i) {
      const Point x{gen.uniform(0, 1), gen.uniform(0, 1)};
      const Vec2 xi{gen.uniform(-2, 2), gen.uniform(-2, 2)};
      const double gx = (op.potential(x, xi + Vec2{h, 0}) - op.potential(x, xi - Vec2{h, 0})) / (2 * h);
      const double gy = (op.potential(x, xi + Vec2{0, h}) - op.potential(x, xi - Vec2{0, h})) / (2 * h);
      const Vec2 want = op.p() * op.apply(x, xi);
      CHECK(norm(Vec2{gx, gy} - want) <= 1e-6 * norm(want));
    }
  }
}

TEST_CASE("property: homogeneity, evenness and potential bounds") {
  testsupport::Gen gen(22);
  for (int trial = 0; trial < 300; ++trial) {
    const double p = gen.uniform(1.1, 5.0);
    const double lo = gen.uniform(0.5, 2.0);
    const double hi = lo + gen.uniform(0.0, 2.0);
    const auto op = OperatorSpec::scalar(
        p, SpatialField([lo, hi](Point x) { return lo + (hi - lo) * x.x; }, lo, hi), lo, hi);
    const Point x{gen.uniform(0, 1), gen.uniform(0, 1)};
    const Vec2 xi{gen.uniform(-3, 3), gen.uniform(-3, 3)};
    const double t = gen.log_uniform(0.1, 10.0);
    const Vec2 lhs = op.apply(x, t * xi);
    const Vec2 rhs = std::pow(t, p - 1) * op.apply(x, xi);
    CHECK(norm(lhs - rhs) <= 1e-10 * norm(rhs));
    CHECK(op.potential(x, -xi) == op.potential(x, xi));
    CHECK(op.potential(x, Vec2{}) == 0.0);
    const double np = std::pow(norm(xi), p);
    CHECK(op.potential(x, xi) >= lo * np * (1 - 1e-14));
    CHECK(op.potential(x, xi) <= hi * np * (1 + 1e-14));
  }
}

TEST_CASE("hypothesis checker on built-in operators") {
  const auto lap = check_hypotheses(OperatorSpec::p_laplacian(2.0), Domain::rectangle(1, 1), 1000, 1);
  CHECK(lap.samples == 1000);
  for (double r : {lap.h1_monotonicity, lap.h2_coercivity, lap.h3_continuity, lap.h4_homogeneity,
                   lap.h5_oddness, lap.h7_cyclic, lap.h8_strict})
    CHECK(r <= 1e-12);
  CHECK(lap.h8_alpha_estimate > 0.0);
  CHECK(lap.h0_vacuous);

  const auto rep = check_hypotheses(smooth_p3(), Domain::interval(1.0), 1000, 2);
  for (double r : {rep.h1_monotonicity, rep.h2_coercivity, rep.h3_continuity, rep.h4_homogeneity,
                   rep.h5_oddness})
    CHECK(r <= 1e-9);
  CHECK(rep.h8_alpha_estimate > 0.0);
  CHECK(rep.h6_ratio_max >= rep.h6_ratio_median);

  for (double p : {1.3, 2.0, 4.0}) {
    const auto r2 = check_hypotheses(OperatorSpec::scalar(p, CoefficientField::piecewise({1.0, 3.0}), 1.0, 3.0),
                                     Domain::rectangle(2.0, 1.0), 500, 3);
    CHECK(r2.failing().empty());
  }
}

TEST_CASE("hypothesis checker is deterministic") {
  const auto a = sample_hypotheses(diffusion_law(smooth_p3(), 2), Domain::rectangle(1, 1), 200, 9);
  const auto b = sample_hypotheses(diffusion_law(smooth_p3(), 2), Domain::rectangle(1, 1), 200, 9);
  CHECK(a.h8_alpha_estimate == b.h8_alpha_estimate);
  CHECK(a.h6_ratio_max == b.h6_ratio_max);
}

TEST_CASE("hypothesis checker rejects a non-odd law") {
  DiffusionLaw law;
  law.dimension = 1;
  law.p = 2.0;
  law.flux = [](Point, Vec2 xi) { return Vec2{xi.x + 0.1, 0.0}; };
  try {
    check_hypotheses(law, Domain::interval(1.0), 1000, 5);
    FAIL("expected rejection");
  } catch (const HypothesisRejected& e) {
    CHECK(e.hypothesis() == "H5");
    CHECK(e.code() == ErrorCode::Rejected);
  }
  DiffusionLaw weak = law;
  weak.flux = [](Point, Vec2 xi) { return 0.5 * xi; };
  CHECK_THROWS_AS(check_hypotheses(weak, Domain::interval(1.0), 100, 5), HypothesisRejected);
  CHECK_THROWS_AS(sample_hypotheses(law, Domain::interval(1.0), 0, 5), Error);
}
