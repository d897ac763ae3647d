#include "homogeig/fem2d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "homogeig/quadrature.hpp"
#include "lanczos.hpp"

namespace homogeig {
namespace {

using detail::Pairs;
using detail::shift_invert;
using Triplet = Eigen::Triplet<double>;

// Grid lines per unit length needed to hit every jump along one axis, or 0
// when the jumps cannot be aligned with a uniform mesh of this side.
long alignment(const ProblemInstance& prob, int axis) {
  const double side = axis == 0 ? prob.domain().lx() : prob.domain().ly();
  long step = 1;
  auto require = [&](double period, int cells) {
    if (step == 0) return;
    const double q = side * cells / period;  // grid lines that must be hit
    const double r = std::round(q);
    if (r < 1 || std::abs(q - r) > 1e-9 * q) {
      step = 0;
      return;
    }
    step = std::lcm(step, static_cast<long>(r));
  };
  for (const ScaledField& f : {prob.rho(), prob.potential()}) {
    if (f.averaged() || f.base().kind() != FieldKind::Piecewise) continue;
    require(*f.epsilon(), f.base().grid_cells(axis));
  }
  for (const SpatialField* f : prob.op().fields())
    if (f->field() && f->field()->kind() == FieldKind::Piecewise) require(1.0, f->field()->grid_cells(axis));
  return step;
}

SparseMatrix symmetrized(const SparseMatrix& m) {
  SparseMatrix t = m.transpose();
  SparseMatrix s = 0.5 * (m + t);
  s.prune(0.0);
  return s;
}

// u = P c for the unknowns c of the constrained space.
SparseMatrix prolongation(const Mesh2& mesh, BcKind kind) {
  const int n = mesh.vertex_count();
  const auto& bnd = mesh.on_boundary();
  std::vector<Triplet> t;
  int col = 0;
  if (kind == BcKind::Dirichlet || kind == BcKind::NonFlux) {
    for (int i = 0; i < n; ++i)
      if (!bnd[i]) t.emplace_back(i, col++, 1.0);
    if (kind == BcKind::NonFlux) {
      for (int i = 0; i < n; ++i)
        if (bnd[i]) t.emplace_back(i, col, 1.0);
      ++col;
    }
  } else {
    for (int i = 0; i < n; ++i) t.emplace_back(i, col++, 1.0);
  }
  SparseMatrix p(n, col);
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

Pairs dense_pencil(const SparseMatrix& a, const SparseMatrix& r, int k) {
  const Eigen::MatrixXd ad(a), rd(r);
  Eigen::LLT<Eigen::MatrixXd> llt(rd);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularPencil, "right-hand matrix is not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ad, rd);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "dense symmetric eigensolver failed");
  return {es.eigenvalues().head(k), es.eigenvectors().leftCols(k), "fem-p1-dense"};
}

// Steklov pencil (A, B) with B supported on the boundary: eliminates the
// interior by the Schur complement and solves densely on the boundary.
Pairs dense_steklov(const SparseMatrix& a, const SparseMatrix& b, const std::vector<char>& bnd, int k) {
  const int n = static_cast<int>(a.rows());
  std::vector<int> bi, ii;
  for (int i = 0; i < n; ++i) (bnd[i] ? bi : ii).push_back(i);
  const Eigen::MatrixXd ad(a), bd(b);
  auto block = [](const Eigen::MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
    return out;
  };
  const Eigen::MatrixXd abb = block(ad, bi, bi), abi = block(ad, bi, ii), aii = block(ad, ii, ii);
  const Eigen::MatrixXd bbb = block(bd, bi, bi);
  Eigen::MatrixXd ext = Eigen::MatrixXd::Zero(ii.size(), bi.size());
  Eigen::MatrixXd schur = abb;
  if (!ii.empty()) {
    Eigen::LLT<Eigen::MatrixXd> llt(aii);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularPencil, "interior block is not positive definite");
    ext = llt.solve(abi.transpose());
    schur -= abi * ext;
  }
  schur = 0.5 * (schur + schur.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> bllt(bbb);
  if (bllt.info() != Eigen::Success) throw Error(ErrorCode::SingularPencil, "boundary mass is not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(schur, bbb);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "dense symmetric eigensolver failed");
  Pairs out;
  out.values = es.eigenvalues().head(k);
  out.vectors.resize(n, k);
  for (int c = 0; c < k; ++c) {
    const Eigen::VectorXd xb = es.eigenvectors().col(c);
    const Eigen::VectorXd xi = -ext * xb;
    for (std::size_t i = 0; i < bi.size(); ++i) out.vectors(bi[i], c) = xb[i];
    for (std::size_t i = 0; i < ii.size(); ++i) out.vectors(ii[i], c) = xi[i];
  }
  out.solver = "fem-p1-dense";
  return out;
}

}  // namespace

std::array<int, 2> resolving_cells(const ProblemInstance& prob, int min_cells) {
  if (prob.dimension() != 2) throw Error(ErrorCode::InvalidArgument, "finite elements need N = 2");
  if (min_cells < 1) throw Error(ErrorCode::InvalidArgument, "min_cells must be >= 1");
  std::array<int, 2> out{};
  for (int axis = 0; axis < 2; ++axis) {
    const double side = axis == 0 ? prob.domain().lx() : prob.domain().ly();
    double need = std::ceil(min_cells * side - 1e-9);
    if (prob.epsilon()) need = std::max(need, std::ceil(side * 4.0 * std::sqrt(2.0) / *prob.epsilon() - 1e-9));
    const long step = alignment(prob, axis);
    long n = static_cast<long>(std::max(1.0, need));
    if (step > 0) n = ((n + step - 1) / step) * step;
    out[axis] = static_cast<int>(n);
  }
  return out;
}

std::shared_ptr<const Mesh2> make_mesh(const ProblemInstance& prob, int min_cells) {
  const auto [nx, ny] = resolving_cells(prob, min_cells);
  return std::make_shared<const Mesh2>(Mesh2::criss_cross(prob.domain().lx(), prob.domain().ly(), nx, ny));
}

AssembledSystem assemble(const ProblemInstance& prob, std::shared_ptr<const Mesh2> mesh) {
  if (prob.dimension() != 2) throw Error(ErrorCode::InvalidArgument, "finite elements need N = 2");
  if (prob.op().p() != 2.0) throw Error(ErrorCode::InvalidArgument, "finite elements need p = 2");
  if (!mesh) throw Error(ErrorCode::InvalidArgument, "null mesh");
  if (std::abs(mesh->lx() - prob.domain().lx()) > 1e-12 || std::abs(mesh->ly() - prob.domain().ly()) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "mesh does not cover the domain");
  if (prob.epsilon() && mesh->diameter() > *prob.epsilon() / 4.0 * (1.0 + 1e-12))
    throw Error(ErrorCode::MeshTooCoarse, "element diameter " + std::to_string(mesh->diameter()) +
                                               " exceeds eps/4 = " + std::to_string(*prob.epsilon() / 4.0));

  const ScaledField rho = prob.rho(), v = prob.potential();
  const OperatorSpec& op = prob.op();
  Resolution res;
  res.add(rho);
  res.add(v);
  for (const SpatialField* f : op.fields()) res.add(*f);

  const int n = mesh->vertex_count();
  const auto& xs = mesh->vertices();
  std::vector<Triplet> tk, tr, tv, tb;
  const std::size_t nt = mesh->triangles().size();
  tk.reserve(9 * nt);
  tr.reserve(9 * nt);
  tv.reserve(9 * nt);
  for (const auto& tri : mesh->triangles()) {
    const Point a = xs[tri[0]], b = xs[tri[1]], c = xs[tri[2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    // Gradients of the barycentric coordinates.
    const std::array<Vec2, 3> g{Vec2{(b.y - c.y) / det, (c.x - b.x) / det}, Vec2{(c.y - a.y) / det, (a.x - c.x) / det},
                                Vec2{(a.y - b.y) / det, (b.x - a.x) / det}};
    double mr[3][3] = {}, mv[3][3] = {};
    double a11 = 0, a12 = 0, a22 = 0;
    quadrature_triangle(a, b, c, res, [&](Point x, double w) {
      const double l1 = ((x.x - a.x) * (c.y - a.y) - (c.x - a.x) * (x.y - a.y)) / det;
      const double l2 = ((b.x - a.x) * (x.y - a.y) - (x.x - a.x) * (b.y - a.y)) / det;
      const double l[3] = {1.0 - l1 - l2, l1, l2};
      const double wr = w * rho(x), wv = w * v(x);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          mr[i][j] += wr * l[i] * l[j];
          mv[i][j] += wv * l[i] * l[j];
        }
      const Matrix2 m = op.matrix_coefficient(x);
      a11 += w * m.a11;
      a12 += w * m.a12;
      a22 += w * m.a22;
    });
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double kij = g[i].x * (a11 * g[j].x + a12 * g[j].y) + g[i].y * (a12 * g[j].x + a22 * g[j].y);
        tk.emplace_back(tri[i], tri[j], kij);
        tr.emplace_back(tri[i], tri[j], mr[i][j]);
        tv.emplace_back(tri[i], tri[j], mv[i][j]);
      }
  }
  for (const auto& e : mesh->boundary_edges()) {
    const Point p = xs[e[0]], q = xs[e[1]];
    const double len = std::hypot(q.x - p.x, q.y - p.y);
    tb.emplace_back(e[0], e[0], len / 3.0);
    tb.emplace_back(e[1], e[1], len / 3.0);
    tb.emplace_back(e[0], e[1], len / 6.0);
    tb.emplace_back(e[1], e[0], len / 6.0);
  }
  AssembledSystem sys;
  sys.mesh = std::move(mesh);
  sys.floor = v.lo() >= 0.0 ? 0.0 : v.lo() / rho.lo();
  auto build = [n](const std::vector<Triplet>& t) {
    SparseMatrix m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return symmetrized(m);
  };
  sys.K = build(tk);
  sys.M_rho = build(tr);
  sys.M_v = build(tv);
  sys.B = build(tb);
  return sys;
}

FemEigenpairs solve_gevp_modes(const AssembledSystem& sys, const BoundaryCondition& bc, int k_max,
                               const FemOptions& opts) {
  if (!sys.mesh) throw Error(ErrorCode::InvalidArgument, "system has no mesh");
  if (k_max < 1) throw Error(ErrorCode::InvalidArgument, "k_max must be >= 1");
  const Mesh2& mesh = *sys.mesh;
  const SparseMatrix a0 = sys.K + sys.M_v;
  SparseMatrix a = a0, r;
  switch (bc.kind) {
    case BcKind::Dirichlet:
    case BcKind::Neumann:
    case BcKind::NonFlux:
      r = sys.M_rho;
      break;
    case BcKind::Robin:
      a = a0 + bc.beta * sys.B;
      r = sys.M_rho;
      break;
    case BcKind::DependentBC:
      r = sys.M_rho + sys.B;
      break;
    case BcKind::Steklov:
      r = sys.B;
      break;
  }

  const double sigma = sys.floor - 1.0 - 0.1 * std::abs(sys.floor);

  Pairs pairs;
  SparseMatrix p;
  if (bc.kind == BcKind::Steklov) {
    int nb = 0;
    for (char c : mesh.on_boundary()) nb += c ? 1 : 0;
    if (nb == 0) throw Error(ErrorCode::SingularPencil, "Steklov pencil has an empty boundary space");
    if (k_max > nb) throw Error(ErrorCode::InvalidArgument, "k_max exceeds the number of boundary unknowns");
    if (a.rows() <= opts.dense_limit)
      pairs = dense_steklov(a, r, mesh.on_boundary(), k_max);
    else
      pairs = shift_invert(a, r, k_max, sigma, opts.tol);
    p.resize(a.rows(), a.rows());
    p.setIdentity();
  } else {
    p = prolongation(mesh, bc.kind);
    const SparseMatrix pt = p.transpose();
    const SparseMatrix ar = symmetrized(pt * a * p), rr = symmetrized(pt * r * p);
    if (k_max > ar.rows()) throw Error(ErrorCode::InvalidArgument, "k_max exceeds the number of unknowns");
    if (ar.rows() <= opts.dense_limit)
      pairs = dense_pencil(ar, rr, k_max);
    else
      pairs = shift_invert(ar, rr, k_max, sigma, opts.tol);
    a = ar;
    r = rr;
  }

  FemEigenpairs out;
  Spectrum& sp = out.spectrum;
  sp.solver = pairs.solver;
  sp.tol = opts.tol;
  sp.bc = bc;
  for (int k = 0; k < k_max; ++k) {
    Eigen::VectorXd c = pairs.vectors.col(k);
    const double lam = pairs.values[k];
    const double rn = c.dot(r * c);
    if (rn > 0) c /= std::sqrt(rn);
    // Fix the sign by the largest component so that reruns agree.
    Eigen::Index imax = 0;
    c.cwiseAbs().maxCoeff(&imax);
    if (c[imax] < 0) c = -c;
    const double res = (a * c - lam * (r * c)).norm() / c.norm();
    sp.values.push_back(lam);
    sp.residuals.push_back(res);
    sp.errors.push_back(res);
    sp.flags.emplace_back();
    const Eigen::VectorXd u = p * c;
    out.modes.emplace_back(sys.mesh, std::vector<double>(u.data(), u.data() + u.size()));
  }
  for (int k = 1; k < k_max; ++k)
    if (std::abs(sp.values[k] - sp.values[k - 1]) <= 1e-8 * std::max(1.0, std::abs(sp.values[k]))) {
      sp.add_flag(k - 1, kFlagMultiple);
      sp.add_flag(k, kFlagMultiple);
    }
  return out;
}

Spectrum solve_gevp(const AssembledSystem& sys, const BoundaryCondition& bc, int k_max, const FemOptions& opts) {
  return solve_gevp_modes(sys, bc, k_max, opts).spectrum;
}

Spectrum solve_fem(const ProblemInstance& prob, int k_max, const FemOptions& opts) {
  Spectrum sp = solve_gevp(assemble(prob, make_mesh(prob, opts.min_cells)), prob.bc(), k_max, opts);
  sp.epsilon = prob.epsilon();
  return sp;
}

Spectrum reference_spectrum(const ProblemInstance& prob, int k_max, const FemOptions& opts) {
  if (opts.richardson_levels != 2 && opts.richardson_levels != 3)
    throw Error(ErrorCode::InvalidArgument, "richardson_levels must be 2 or 3");
  const auto [nx, ny] = resolving_cells(prob, opts.min_cells);
  const double lx = prob.domain().lx(), ly = prob.domain().ly();
  auto solve_at = [&](int factor) {
    const auto mesh = std::make_shared<const Mesh2>(Mesh2::criss_cross(lx, ly, factor * nx, factor * ny));
    return solve_gevp(assemble(prob, mesh), prob.bc(), k_max, opts);
  };
  const Spectrum s1 = solve_at(1);
  Spectrum sp = solve_at(2);
  std::vector<double> coarse(k_max);
  for (int k = 0; k < k_max; ++k) {
    const double lh = s1.values[k], lh2 = sp.values[k];
    coarse[k] = (4.0 * lh2 - lh) / 3.0;
    sp.values[k] = coarse[k];
    sp.errors[k] = std::abs(lh2 - lh) / 3.0;
  }
  if (opts.richardson_levels == 3) {
    // The extrapolated values converge like h^4; compare the two
    // extrapolations to estimate the error of the finer one.
    const Spectrum s4 = solve_at(4);
    const std::vector<double> mid = sp.values;
    std::vector<double> lh2(k_max);
    for (int k = 0; k < k_max; ++k) lh2[k] = (3.0 * mid[k] + s1.values[k]) / 4.0;
    sp = s4;
    for (int k = 0; k < k_max; ++k) {
      sp.values[k] = (4.0 * s4.values[k] - lh2[k]) / 3.0;
      sp.errors[k] = std::abs(sp.values[k] - mid[k]) / 15.0;
    }
  }
  sp.solver += opts.richardson_levels == 3 ? "+richardson3" : "+richardson";
  sp.epsilon = prob.epsilon();
  return sp;
}

void write_triplets(std::ostream& out, const SparseMatrix& m) {
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  out.precision(17);
  for (int j = 0; j < m.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(m, j); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

void write_mesh(std::ostream& out, const Mesh2& mesh) {
  out.precision(17);
  out << "vertices " << mesh.vertex_count() << '\n';
  for (const Point& p : mesh.vertices()) out << p.x << ' ' << p.y << '\n';
  out << "triangles " << mesh.triangles().size() << '\n';
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "boundary_edges " << mesh.boundary_edges().size() << '\n';
  for (const auto& e : mesh.boundary_edges()) out << e[0] << ' ' << e[1] << '\n';
}

}  // namespace homogeig
