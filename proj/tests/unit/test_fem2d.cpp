#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "homogeig/fem2d.hpp"
#include "support/random.hpp"

using namespace homogeig;
using std::numbers::pi;
using testsupport::rel_err;

namespace {

const CoefficientField kOne = CoefficientField::constant(1.0);

ProblemInstance square(BoundaryCondition bc, CoefficientField rho = kOne, CoefficientField v = kOne,
                       Scale eps = kAveraged) {
  return ProblemInstance(Domain::rectangle(1, 1), OperatorSpec::p_laplacian(2), std::move(rho), std::move(v),
                         bc, eps);
}

double ones(const SparseMatrix& m) {
  Eigen::VectorXd e = Eigen::VectorXd::Ones(m.cols());
  return e.dot(m * e);
}

// (m^2 + n^2) pi^2 for m, n >= start, sorted.
std::vector<double> box_values(int start, int count) {
  std::vector<double> out;
  for (int m = start; m < start + 8; ++m)
    for (int n = start; n < start + 8; ++n) out.push_back((m * m + n * n) * pi * pi);
  std::sort(out.begin(), out.end());
  out.resize(static_cast<std::size_t>(count));
  return out;
}

}  // namespace

TEST_CASE("assembled matrices reproduce the exact functionals of constants") {
  const auto rho = CoefficientField::piecewise({1, 3, 3, 1}, 2, 2);
  const auto v = CoefficientField::trigonometric(2.0, {{0.5, 1, 0, false}, {0.25, 0, 1, true}});
  const auto prob = square(BoundaryCondition::neumann(), rho, v, 1.0 / 8);
  const auto sys = assemble(prob, make_mesh(prob, 16));
  CHECK(ones(sys.M_rho) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(ones(sys.M_v) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(ones(sys.B) == doctest::Approx(4.0).epsilon(1e-13));
  Eigen::VectorXd k1 = sys.K * Eigen::VectorXd::Ones(sys.K.cols());
  CHECK(k1.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(sys.floor == 0.0);
}

TEST_CASE("resolving mesh aligns with jumps and refines with eps") {
  const auto rho = CoefficientField::piecewise({1, 3, 3, 1}, 2, 2);
  const auto cells = resolving_cells(square(BoundaryCondition::dirichlet(), rho, kOne, 1.0 / 8), 16);
  CHECK(cells[0] % 16 == 0);
  CHECK(1.0 / cells[0] <= 1.0 / 8 / (4 * std::sqrt(2.0)) + 1e-15);
  CHECK(resolving_cells(square(BoundaryCondition::dirichlet()), 16) == std::array<int, 2>{16, 16});
  CHECK(make_mesh(square(BoundaryCondition::dirichlet(), rho, kOne, 1.0 / 8), 16)->diameter() <= 1.0 / 32);
}

TEST_CASE("Dirichlet unit square matches (m^2 + n^2) pi^2") {
  FemOptions o;
  o.min_cells = 64;
  const auto s64 = solve_fem(square(BoundaryCondition::dirichlet(), kOne, CoefficientField::constant(0)), 6, o);
  o.min_cells = 128;
  const auto s128 = solve_fem(square(BoundaryCondition::dirichlet(), kOne, CoefficientField::constant(0)), 6, o);
  const auto want = box_values(1, 6);
  for (int k = 0; k < 6; ++k) {
    CHECK(rel_err(s64.values[k], want[k]) < 1e-2);
    CHECK(rel_err(s128.values[k], want[k]) < 3e-3);
    // P1 eigenvalues approach from above.
    CHECK(s128.values[k] >= want[k]);
    CHECK(s128.values[k] <= s64.values[k]);
  }
  CHECK(s64.has_flag(1, kFlagMultiple));
}

TEST_CASE("Neumann with V = 1 matches 1 + (m^2 + n^2) pi^2") {
  FemOptions o;
  o.min_cells = 128;
  const auto s = solve_fem(square(BoundaryCondition::neumann()), 6, o);
  const auto want = box_values(0, 6);
  for (int k = 0; k < 6; ++k) CHECK(rel_err(s.values[k], 1.0 + want[k]) < 3e-3);
  CHECK(s.values[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("constant coefficients give lambda_1 = V / rho for Neumann and Steklov bound") {
  const auto s = solve_fem(square(BoundaryCondition::neumann(), CoefficientField::constant(2.5),
                                  CoefficientField::constant(4.0)),
                           3);
  CHECK(s.values[0] == doctest::Approx(1.6).epsilon(1e-10));
  // Steklov: u = 1 has quotient area / perimeter, an upper bound for lambda_1.
  const auto st = solve_fem(square(BoundaryCondition::steklov()), 3);
  CHECK(st.values[0] <= 0.25);
  CHECK(st.values[0] > 0.2);
}

TEST_CASE("Richardson reference beats the raw mesh on Dirichlet") {
  FemOptions o;
  o.min_cells = 64;
  const auto prob = square(BoundaryCondition::dirichlet(), kOne, CoefficientField::constant(0));
  const auto raw = solve_fem(prob, 4, o);
  const auto ref = reference_spectrum(prob, 4, o);
  const auto want = box_values(1, 4);
  CHECK(ref.solver.find("richardson") != std::string::npos);
  for (int k = 0; k < 4; ++k) {
    CHECK(rel_err(ref.values[k], want[k]) < 1e-4);
    CHECK(std::abs(ref.values[k] - want[k]) < std::abs(raw.values[k] - want[k]));
    CHECK(ref.errors[k] > 0.0);
  }
}

TEST_CASE("three-level Richardson is closer than two levels") {
  FemOptions o;
  o.min_cells = 32;
  const auto prob = square(BoundaryCondition::dirichlet(), kOne, CoefficientField::constant(0));
  const auto two = reference_spectrum(prob, 4, o);
  o.richardson_levels = 3;
  const auto three = reference_spectrum(prob, 4, o);
  const auto want = box_values(1, 4);
  CHECK(three.solver.find("+richardson3") != std::string::npos);
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(three.values[k] - want[k]) < std::abs(two.values[k] - want[k]));
    CHECK(std::abs(three.values[k] - want[k]) <= 10.0 * three.errors[k] + 1e-9);
  }
  o.richardson_levels = 4;
  CHECK_THROWS_AS(reference_spectrum(prob, 2, o), Error);
}

TEST_CASE("dense and Lanczos paths agree for every condition") {
  const auto rho = CoefficientField::piecewise({1, 3, 3, 1}, 2, 2);
  const auto v = CoefficientField::piecewise({1, 2}, 2, 1);
  for (auto bc : {BoundaryCondition::dirichlet(), BoundaryCondition::neumann(), BoundaryCondition::robin(2.0),
                  BoundaryCondition::nonflux(), BoundaryCondition::dependent(), BoundaryCondition::steklov()}) {
    CAPTURE(bc.label());
    const auto prob = square(bc, rho, v, 1.0 / 2);
    const auto sys = assemble(prob, make_mesh(prob, 16));
    FemOptions dense, sparse;
    dense.dense_limit = 100000;
    sparse.dense_limit = 0;
    const auto a = solve_gevp(sys, bc, 6, dense);
    const auto b = solve_gevp(sys, bc, 6, sparse);
    CHECK(a.solver != b.solver);
    for (int k = 0; k < 6; ++k) {
      CHECK(rel_err(a.values[k], b.values[k]) < 1e-9);
      CHECK(a.residuals[k] <= 1e-9 * std::max(1.0, a.values[k]));
      CHECK(b.residuals[k] <= 1e-9 * std::max(1.0, b.values[k]));
    }
  }
}

TEST_CASE("eigenvectors are normalized, conforming and satisfy the quotient") {
  const auto rho = CoefficientField::piecewise({1, 3, 3, 1}, 2, 2);
  for (auto bc : {BoundaryCondition::dirichlet(), BoundaryCondition::nonflux(), BoundaryCondition::robin(1.0),
                  BoundaryCondition::steklov()}) {
    CAPTURE(bc.label());
    const auto prob = square(bc, rho, kOne, 1.0 / 2);
    const auto sys = assemble(prob, make_mesh(prob, 16));
    const auto pairs = solve_gevp_modes(sys, bc, 4);
    REQUIRE(pairs.modes.size() == 4);
    for (int k = 0; k < 4; ++k) {
      const auto& u = pairs.modes[k];
      CHECK(u.conforms(bc, 1e-10));
      CHECK(rel_err(rayleigh_quotient(u, prob), pairs.spectrum.values[k]) < 1e-8);
      const auto& vals = u.values();
      const auto big = std::max_element(vals.begin(), vals.end(),
                                        [](double x, double y) { return std::abs(x) < std::abs(y); });
      CHECK(*big > 0.0);
    }
  }
}

TEST_CASE("ordering chain holds on a common mesh") {
  testsupport::Gen gen(7);
  for (int trial = 0; trial < 3; ++trial) {
    const auto rho = CoefficientField::piecewise(gen.values(4, 0.5, 3.0), 2, 2);
    const auto v = CoefficientField::piecewise(gen.values(4, 0.5, 2.0), 2, 2);
    const double beta = gen.log_uniform(0.1, 10.0);
    const auto base = square(BoundaryCondition::dirichlet(), rho, v, 1.0 / 4);
    const auto sys = assemble(base, make_mesh(base, 16));
    auto solve = [&](BoundaryCondition bc) { return solve_gevp(sys, bc, 10).values; };
    const auto D = solve(BoundaryCondition::dirichlet());
    const auto N = solve(BoundaryCondition::neumann());
    const auto R = solve(BoundaryCondition::robin(beta));
    const auto P = solve(BoundaryCondition::nonflux());
    const auto B = solve(BoundaryCondition::dependent());
    const auto S = solve(BoundaryCondition::steklov());
    for (int k = 0; k < 10; ++k) {
      auto le = [](double a, double b) { return a <= b + 1e-8 * std::max(1.0, std::abs(b)); };
      CAPTURE(k);
      CHECK(le(B[k], N[k]));
      CHECK(le(N[k], std::min(P[k], R[k])));
      CHECK(le(std::max(P[k], R[k]), D[k]));
      CHECK(le(B[k], S[k]));
    }
  }
}

TEST_CASE("Robin interpolates between Neumann and Dirichlet") {
  const auto prob = square(BoundaryCondition::neumann());
  const auto sys = assemble(prob, make_mesh(prob, 32));
  const auto N = solve_gevp(sys, BoundaryCondition::neumann(), 3).values;
  const auto D = solve_gevp(sys, BoundaryCondition::dirichlet(), 3).values;
  const auto r0 = solve_gevp(sys, BoundaryCondition::robin(0.0), 3).values;
  const auto rs = solve_gevp(sys, BoundaryCondition::robin(1e-8), 3).values;
  const auto rl = solve_gevp(sys, BoundaryCondition::robin(1e6), 3).values;
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(r0[k] - N[k]) <= 1e-9 * std::max(1.0, N[k]));
    CHECK(std::abs(rs[k] - N[k]) <= 1e-6);
    CHECK(rel_err(rl[k], D[k]) < 1e-2);
  }
}

TEST_CASE("eigenvalues scale inversely with rho") {
  testsupport::Gen gen(11);
  const auto rho = CoefficientField::piecewise(gen.values(4, 1.0, 2.0), 2, 2);
  const auto prob = square(BoundaryCondition::dirichlet(), rho, CoefficientField::constant(0), 1.0 / 2);
  const auto base = solve_fem(prob, 5);
  for (int trial = 0; trial < 3; ++trial) {
    const double t = gen.log_uniform(0.2, 5.0);
    const auto scaled =
        solve_fem(square(BoundaryCondition::dirichlet(), linear_combination(t, rho, 0.0, kOne),
                         CoefficientField::constant(0), 1.0 / 2),
                  5);
    for (int k = 0; k < 5; ++k) CHECK(rel_err(scaled.values[k] * t, base.values[k]) < 1e-9);
  }
}

TEST_CASE("fem2d errors") {
  const auto rho = CoefficientField::piecewise({1, 3}, 2, 1);
  const auto prob = square(BoundaryCondition::dirichlet(), rho, kOne, 1.0 / 8);
  auto coarse = std::make_shared<const Mesh2>(Mesh2::criss_cross(1, 1, 8, 8));
  try {
    assemble(prob, coarse);
    FAIL("expected MESH_TOO_COARSE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MeshTooCoarse);
  }

  auto sys = assemble(square(BoundaryCondition::neumann()), coarse);
  sys.M_rho = SparseMatrix(sys.M_rho.rows(), sys.M_rho.cols());
  try {
    solve_gevp(sys, BoundaryCondition::neumann(), 2, FemOptions{1e-9, 100000, 16});
    FAIL("expected SINGULAR_PENCIL");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularPencil);
  }

  const auto p3 = ProblemInstance(Domain::rectangle(1, 1), OperatorSpec::p_laplacian(3), kOne, kOne,
                                  BoundaryCondition::dirichlet(), kAveraged);
  CHECK_THROWS_AS(solve_fem(p3, 2), Error);
  CHECK_THROWS_AS(solve_fem(square(BoundaryCondition::dirichlet()), 0), Error);
}

TEST_CASE("triplet and mesh exports") {
  auto mesh = std::make_shared<const Mesh2>(Mesh2::criss_cross(1, 1, 2, 2));
  const auto sys = assemble(square(BoundaryCondition::neumann()), mesh);
  std::ostringstream out;
  write_triplets(out, sys.M_rho);
  std::istringstream in(out.str());
  long rows = 0, cols = 0, nnz = 0;
  in >> rows >> cols >> nnz;
  CHECK(rows == 9);
  CHECK(cols == 9);
  CHECK(nnz == sys.M_rho.nonZeros());
  double total = 0.0;
  int i = 0, j = 0;
  double v = 0.0;
  long lines = 0;
  while (in >> i >> j >> v) {
    total += v;
    ++lines;
  }
  CHECK(lines == nnz);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));

  std::ostringstream mout;
  write_mesh(mout, *mesh);
  CHECK(mout.str().rfind("vertices 9\n", 0) == 0);
  CHECK(mout.str().find("triangles 8\n") != std::string::npos);
  CHECK(mout.str().find("boundary_edges 8\n") != std::string::npos);
}
