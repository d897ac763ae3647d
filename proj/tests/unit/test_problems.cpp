#include <cmath>
#include <memory>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "homogeig/problems.hpp"
#include "homogeig/quadrature.hpp"
#include "support/random.hpp"

using namespace homogeig;
using std::numbers::pi;

namespace {

std::shared_ptr<const Mesh1> line(int n, double L = 1.0) {
  return std::make_shared<const Mesh1>(Mesh1::uniform(L, n));
}
std::shared_ptr<const Mesh2> square(int n) {
  return std::make_shared<const Mesh2>(Mesh2::criss_cross(1.0, 1.0, n, n));
}
CoefficientField halves() { return CoefficientField::piecewise({1.0, 3.0}); }

ProblemInstance problem_1d(BoundaryCondition bc, double p, CoefficientField rho, CoefficientField v) {
  return ProblemInstance(Domain::interval(1.0), OperatorSpec::p_laplacian(p), std::move(rho),
                         std::move(v), bc, kAveraged);
}

}  // namespace

TEST_CASE("boundary condition parsing") {
  CHECK(parse_bc("dirichlet").kind == BcKind::Dirichlet);
  CHECK(parse_bc("P").kind == BcKind::NonFlux);
  CHECK(parse_bc("Steklov").kind == BcKind::Steklov);
  CHECK(parse_bc("robin", 2.5).beta == 2.5);
  CHECK(parse_bc("robin", 2.5).label() == "robin(2.5)");
  CHECK_THROWS_AS(parse_bc("periodic"), Error);
  CHECK_THROWS_AS(BoundaryCondition::robin(-1.0), Error);
  CHECK(bc_letter(BcKind::DependentBC) == 'B');
}

TEST_CASE("problem validation") {
  const auto v0 = CoefficientField::constant(0.0);
  const auto one = CoefficientField::constant(1.0);
  CHECK_THROWS_AS(problem_1d(BoundaryCondition::dirichlet(), 2, v0, one), Error);
  CHECK_THROWS_AS(problem_1d(BoundaryCondition::steklov(), 2, one, one), Error);
  auto sq = [&](BoundaryCondition bc, CoefficientField v) {
    return ProblemInstance(Domain::rectangle(1, 1), OperatorSpec::p_laplacian(2), one, v, bc, 0.25);
  };
  CHECK_THROWS_AS(sq(BoundaryCondition::steklov(), v0), Error);
  CHECK_THROWS_AS(sq(BoundaryCondition::dependent(), CoefficientField::trigonometric(0.5, {{0.6, 1, 0, true}})), Error);
  CHECK_NOTHROW(sq(BoundaryCondition::steklov(), one));
  CHECK(sq(BoundaryCondition::steklov(), one).theory_assumes_c1_boundary());
  CHECK_FALSE(sq(BoundaryCondition::nonflux(), one).theory_assumes_c1_boundary());
  CHECK_NOTHROW(problem_1d(BoundaryCondition::dirichlet(), 2, one, CoefficientField::constant(-3.0)));
  CHECK_THROWS_AS(ProblemInstance(Domain::interval(1), OperatorSpec::p_laplacian(2), one, one,
                                  BoundaryCondition::dirichlet(), 0.0),
                  Error);
}

TEST_CASE("mesh counts and boundary") {
  const Mesh2 m = Mesh2::criss_cross(2.0, 1.0, 6, 4);
  CHECK(m.vertex_count() == 7 * 5);
  CHECK(m.triangles().size() == 48);
  CHECK(m.boundary_edges().size() == 20);
  double area = 0.0;
  for (const auto& t : m.triangles()) {
    const Point a = m.vertices()[t[0]], b = m.vertices()[t[1]], c = m.vertices()[t[2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    CHECK(det > 0.0);
    area += det / 2;
  }
  CHECK(area == doctest::Approx(2.0));
  // Every boundary edge is an edge of exactly one triangle.
  for (const auto& e : m.boundary_edges()) {
    int owners = 0;
    for (const auto& t : m.triangles())
      for (int k = 0; k < 3; ++k)
        if ((t[k] == e[0] && t[(k + 1) % 3] == e[1]) || (t[k] == e[1] && t[(k + 1) % 3] == e[0])) ++owners;
    CHECK(owners == 1);
  }
}

TEST_CASE("functional_F examples") {
  auto ones = interpolate(line(8), [](double) { return 1.0; });
  CHECK(functional_F(ones, ScaledField(CoefficientField::constant(2.0), kAveraged), 3.0) == doctest::Approx(2.0));
  CHECK(functional_F(ones, ScaledField(halves(), 0.25), 2.0) == doctest::Approx(2.0).epsilon(1e-14));
  auto hat = interpolate(line(2), [](double x) { return 1.0 - std::abs(2 * x - 1); });
  CHECK(functional_F(hat, ScaledField(CoefficientField::constant(1.0), kAveraged), 2.0) ==
        doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("functional_F matches an adaptive oracle for oscillating weights") {
  using boost::math::quadrature::gauss_kronrod;
  const auto u = interpolate(line(7), [](double x) { return std::sin(3 * x) - 0.2; });
  for (double p : {1.5, 2.0, 3.3}) {
    const ScaledField w(halves(), 1.0 / 6);
    // Oracle: split at every 1/12 and at every node.
    double want = 0.0;
    std::vector<double> pts;
    for (int i = 0; i <= 12; ++i) pts.push_back(i / 12.0);
    for (int i = 1; i < 7; ++i) pts.push_back(i / 7.0);
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
      want += gauss_kronrod<double, 61>::integrate(
          [&](double x) { return w(Point{x, 0}) * std::pow(std::abs(u(Point{x, 0})), p); }, pts[i],
          pts[i + 1], 15, 1e-14);
    CHECK(functional_F(u, w, p) == doctest::Approx(want).epsilon(1e-11));
  }
}

TEST_CASE("functional_G and H examples") {
  auto c = interpolate(line(5), [](double) { return 4.0; });
  CHECK(functional_G(c, OperatorSpec::p_laplacian(3)) == 0.0);
  auto x = interpolate(line(5), [](double t) { return t; });
  CHECK(functional_G(x, OperatorSpec::p_laplacian(2)) == doctest::Approx(1.0));
  CHECK(functional_G(x, OperatorSpec::scalar(4, 2.0, 1.0, 2.0)) == doctest::Approx(2.0));
  CHECK(functional_H(interpolate(square(4), [](Point) { return 1.0; }), 2.0) == doctest::Approx(4.0));
  CHECK(functional_H(interpolate(square(4), [](Point q) { return q.x * (1 - q.x) * q.y * (1 - q.y); }), 2.0) == 0.0);
  CHECK(functional_H(interpolate(line(3), [](double) { return -1.5; }), 3.0) ==
        doctest::Approx(2 * std::pow(1.5, 3)));
}

TEST_CASE("2D functionals are exact for P1 data") {
  auto m = square(6);
  auto u = interpolate(m, [](Point q) { return 2 * q.x - q.y + 0.5; });
  // grad u = (2, -1) everywhere.
  CHECK(functional_G(u, OperatorSpec::p_laplacian(2)) == doctest::Approx(5.0));
  // Integral of (2x - y + 1/2)^2 over the unit square.
  CHECK(functional_F(u, ScaledField(CoefficientField::constant(1.0), kAveraged), 2.0) ==
        doctest::Approx(4.0 / 3 + 1.0 / 3 + 0.25 - 1.0 + 1.0 - 0.5).epsilon(1e-13));
  auto one = interpolate(m, [](Point) { return 1.0; });
  const auto pw = CoefficientField::piecewise({1, 2, 3, 4, 5, 6}, 3, 2);
  CHECK(functional_F(one, ScaledField(pw, 1.0 / 5), 2.0) == doctest::Approx(3.5).epsilon(1e-12));
  const auto trig = CoefficientField::trigonometric(1.0, {{0.5, 1, 1, true}});
  CHECK(functional_F(one, ScaledField(trig, 1.0 / 4), 2.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("point evaluation reproduces linear functions") {
  auto u = interpolate(square(5), [](Point q) { return 3 * q.x + 7 * q.y - 1; });
  testsupport::Gen gen(5);
  for (int i = 0; i < 200; ++i) {
    const Point q{gen.uniform(0, 1), gen.uniform(0, 1)};
    CHECK(u(q) == doctest::Approx(3 * q.x + 7 * q.y - 1).epsilon(1e-13));
  }
}

TEST_CASE("rayleigh quotient examples") {
  const auto rho2 = CoefficientField::constant(2.0), v3 = CoefficientField::constant(3.0);
  auto one = interpolate(line(4), [](double) { return 1.0; });
  CHECK(rayleigh_quotient(one, problem_1d(BoundaryCondition::neumann(), 2, rho2, v3)) == doctest::Approx(1.5));
  ProblemInstance stek(Domain::rectangle(1, 1), OperatorSpec::p_laplacian(2), rho2,
                       CoefficientField::constant(1.0), BoundaryCondition::steklov(), kAveraged);
  CHECK(rayleigh_quotient(interpolate(square(4), [](Point) { return 1.0; }), stek) == doctest::Approx(0.25));
  auto bubble = interpolate(square(4), [](Point q) { return q.x * (1 - q.x) * q.y * (1 - q.y); });
  CHECK_THROWS_AS(rayleigh_quotient(bubble, stek), Error);
  try {
    rayleigh_quotient(bubble, stek);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroDenominator);
  }
  // Robin adds beta H, DependentBC adds H below.
  const auto one_c = CoefficientField::constant(1.0);
  ProblemInstance rob(Domain::rectangle(1, 1), OperatorSpec::p_laplacian(2), one_c, one_c,
                      BoundaryCondition::robin(2.0), kAveraged);
  auto c1 = interpolate(square(4), [](Point) { return 1.0; });
  CHECK(rayleigh_quotient(c1, rob) == doctest::Approx(1.0 + 8.0));
  CHECK(rayleigh_quotient(c1, rob.with_bc(BoundaryCondition::dependent())) == doctest::Approx(1.0 / 5));
}

TEST_CASE("property: quotient scale invariance and F monotonicity") {
  testsupport::Gen gen(31);
  const BoundaryCondition bcs[] = {BoundaryCondition::dirichlet(), BoundaryCondition::neumann(),
                                   BoundaryCondition::robin(0.7), BoundaryCondition::nonflux(),
                                   BoundaryCondition::dependent(), BoundaryCondition::steklov()};
  auto m = square(6);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> vals(static_cast<std::size_t>(m->vertex_count()));
    for (double& v : vals) v = gen.uniform(-1, 1);
    const DiscreteFunction u(m, vals);
    const auto rho = CoefficientField::piecewise(gen.values(4, 0.5, 3.0), 2, 2);
    const auto v = CoefficientField::piecewise(gen.values(4, 0.2, 2.0), 2, 2);
    const auto& bc = bcs[trial % 6];
    ProblemInstance prob(Domain::rectangle(1, 1), OperatorSpec::p_laplacian(2), rho, v, bc, 1.0 / 3);
    const double t = gen.coin() ? gen.uniform(0.1, 10) : -gen.uniform(0.1, 10);
    const double q1 = rayleigh_quotient(u, prob), q2 = rayleigh_quotient(u.scaled(t), prob);
    CHECK(std::abs(q1 - q2) <= 1e-10 * std::abs(q1));
  }
  auto l = line(9);
  for (int trial = 0; trial < 40; ++trial) {
    const double p = gen.uniform(1.2, 4.0);
    std::vector<double> vals(10);
    for (double& v : vals) v = gen.uniform(-1, 1);
    const DiscreteFunction u(l, vals);
    const auto w1 = gen.values(3, 0.1, 2.0);
    auto w2 = w1;
    for (double& x : w2) x += gen.uniform(0, 1);
    const double eps = 1.0 / gen.integer(1, 7);
    CHECK(functional_F(u, ScaledField(CoefficientField::piecewise(w1), eps), p) <=
          functional_F(u, ScaledField(CoefficientField::piecewise(w2), eps), p));
    const auto prob = problem_1d(BoundaryCondition::robin(0.3), p, CoefficientField::piecewise(w2),
                                 CoefficientField::piecewise(w1));
    const double t = gen.uniform(0.1, 10);
    CHECK(std::abs(rayleigh_quotient(u, prob) - rayleigh_quotient(u.scaled(t), prob)) <=
          1e-10 * std::abs(rayleigh_quotient(u, prob)));
  }
}

TEST_CASE("trace conformity") {
  auto m = square(4);
  auto zero_trace = interpolate(m, [](Point q) { return std::sin(pi * q.x) * std::sin(pi * q.y); });
  CHECK(zero_trace.conforms(BoundaryCondition::dirichlet(), 1e-12));
  auto shifted = interpolate(m, [](Point q) { return 2 + std::sin(pi * q.x) * std::sin(pi * q.y); });
  CHECK_FALSE(shifted.conforms(BoundaryCondition::dirichlet()));
  CHECK(shifted.conforms(BoundaryCondition::nonflux(), 1e-12));
  auto lin = interpolate(m, [](Point q) { return q.x; });
  CHECK_FALSE(lin.conforms(BoundaryCondition::nonflux()));
  CHECK(lin.conforms(BoundaryCondition::neumann()));
}
