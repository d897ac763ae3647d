#include "homogeig/problems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "homogeig/quadrature.hpp"

namespace homogeig {
namespace {

struct LinearPiece {
  Point a;
  double ua;
  Vec2 grad;
  double at(Point x) const { return ua + grad.x * (x.x - a.x) + grad.y * (x.y - a.y); }
};

LinearPiece triangle_piece(const Mesh2& m, const std::vector<double>& u, const std::array<int, 3>& t) {
  const Point a = m.vertices()[t[0]], b = m.vertices()[t[1]], c = m.vertices()[t[2]];
  const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  const double du1 = u[t[1]] - u[t[0]], du2 = u[t[2]] - u[t[0]];
  const Vec2 g{(du1 * (c.y - a.y) - du2 * (b.y - a.y)) / det,
               (du2 * (b.x - a.x) - du1 * (c.x - a.x)) / det};
  return {a, u[t[0]], g};
}

// Cuts at the zero of a linear function on [a, b] that changes sign, with
// geometric grading towards it so that Gauss rules resolve |u|^p there.
std::vector<double> zero_cuts(double a, double b, double ua, double ub) {
  std::vector<double> out;
  if (!(ua * ub < 0.0)) return out;
  const double z = a + (b - a) * ua / (ua - ub);
  out.push_back(z);
  for (double d = 0.5 * (b - a); d > 1e-12 * (b - a); d *= 0.5) {
    out.push_back(z - d);
    out.push_back(z + d);
  }
  return out;
}

}  // namespace

const char* to_string(BcKind kind) {
  switch (kind) {
    case BcKind::Dirichlet: return "dirichlet";
    case BcKind::Neumann: return "neumann";
    case BcKind::Robin: return "robin";
    case BcKind::NonFlux: return "nonflux";
    case BcKind::DependentBC: return "dependent";
    case BcKind::Steklov: return "steklov";
  }
  return "unknown";
}

char bc_letter(BcKind kind) {
  switch (kind) {
    case BcKind::Dirichlet: return 'D';
    case BcKind::Neumann: return 'N';
    case BcKind::Robin: return 'R';
    case BcKind::NonFlux: return 'P';
    case BcKind::DependentBC: return 'B';
    case BcKind::Steklov: return 'S';
  }
  return '?';
}

BoundaryCondition BoundaryCondition::robin(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw Error(ErrorCode::InvalidArgument, "Robin coefficient must be finite and >= 0");
  return {BcKind::Robin, beta};
}

std::string BoundaryCondition::label() const {
  if (kind != BcKind::Robin) return to_string(kind);
  char buf[64];
  std::snprintf(buf, sizeof buf, "robin(%.17g)", beta);
  return buf;
}

BoundaryCondition parse_bc(const std::string& tag, double beta) {
  std::string t = tag;
  if (t.size() > 1)
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "dirichlet" || t == "D") return BoundaryCondition::dirichlet();
  if (t == "neumann" || t == "N") return BoundaryCondition::neumann();
  if (t == "robin" || t == "R") return BoundaryCondition::robin(beta);
  if (t == "nonflux" || t == "P") return BoundaryCondition::nonflux();
  if (t == "dependent" || t == "B") return BoundaryCondition::dependent();
  if (t == "steklov" || t == "S") return BoundaryCondition::steklov();
  throw Error(ErrorCode::InvalidArgument, "unknown boundary condition '" + tag + "'");
}

ProblemInstance::ProblemInstance(Domain domain, OperatorSpec op, CoefficientField rho,
                                 CoefficientField v, BoundaryCondition bc, Scale eps)
    : domain_(domain), op_(std::move(op)), rho_(std::move(rho)), v_(std::move(v)), bc_(bc), eps_(eps) {
  if (eps_ && !(*eps_ > 0.0 && std::isfinite(*eps_)))
    throw Error(ErrorCode::InvalidArgument, "epsilon must be positive or averaged");
  if (!(rho_.lo() > 0.0)) throw Error(ErrorCode::InvalidArgument, "weight rho needs lo > 0");
  if (bc_.kind == BcKind::Robin && !(bc_.beta >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "Robin coefficient must be >= 0");
  const bool boundary_eigen = bc_.kind == BcKind::DependentBC || bc_.kind == BcKind::Steklov;
  if (boundary_eigen && !(v_.lo() > 0.0))
    throw Error(ErrorCode::InvalidArgument,
                std::string(to_string(bc_.kind)) + " problems need a potential with lo > 0");
  if (boundary_eigen && dimension() != 2)
    throw Error(ErrorCode::InvalidArgument,
                std::string(to_string(bc_.kind)) + " problems are only supported for N = 2");
  if (op_.is_matrix() && dimension() != 2)
    throw Error(ErrorCode::InvalidArgument, "matrix diffusion needs N = 2");
}

ProblemInstance ProblemInstance::at_scale(Scale eps) const {
  return ProblemInstance(domain_, op_, rho_, v_, bc_, eps);
}

ProblemInstance ProblemInstance::with_bc(BoundaryCondition bc) const {
  return ProblemInstance(domain_, op_, rho_, v_, bc, eps_);
}

bool ProblemInstance::theory_assumes_c1_boundary() const {
  return bc_.kind != BcKind::Dirichlet && bc_.kind != BcKind::NonFlux;
}

DiscreteFunction::DiscreteFunction(std::shared_ptr<const Mesh1> mesh, std::vector<double> values)
    : mesh1_(std::move(mesh)), values_(std::move(values)) {
  if (!mesh1_ || static_cast<int>(values_.size()) != mesh1_->vertex_count())
    throw Error(ErrorCode::InvalidArgument, "nodal values do not match the mesh");
}

DiscreteFunction::DiscreteFunction(std::shared_ptr<const Mesh2> mesh, std::vector<double> values)
    : mesh2_(std::move(mesh)), values_(std::move(values)) {
  if (!mesh2_ || static_cast<int>(values_.size()) != mesh2_->vertex_count())
    throw Error(ErrorCode::InvalidArgument, "nodal values do not match the mesh");
}

double DiscreteFunction::operator()(Point x) const {
  if (mesh1_) {
    const auto& xs = mesh1_->nodes();
    auto it = std::upper_bound(xs.begin(), xs.end(), x.x);
    std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    i = std::min(i, xs.size() - 2);
    const double t = (x.x - xs[i]) / (xs[i + 1] - xs[i]);
    return (1.0 - t) * values_[i] + t * values_[i + 1];
  }
  const Mesh2& m = *mesh2_;
  const int i = std::clamp(static_cast<int>(std::floor(x.x / m.hx())), 0, m.nx() - 1);
  const int j = std::clamp(static_cast<int>(std::floor(x.y / m.hy())), 0, m.ny() - 1);
  const double s = x.x / m.hx() - i, t = x.y / m.hy() - j;
  const double u00 = values_[m.vertex(i, j)], u10 = values_[m.vertex(i + 1, j)];
  const double u01 = values_[m.vertex(i, j + 1)], u11 = values_[m.vertex(i + 1, j + 1)];
  if ((i + j) % 2 == 0) {
    if (s >= t) return u00 + s * (u10 - u00) + t * (u11 - u10);
    return u00 + t * (u01 - u00) + s * (u11 - u01);
  }
  if (s + t <= 1.0) return u00 + s * (u10 - u00) + t * (u01 - u00);
  return u11 + (1.0 - s) * (u01 - u11) + (1.0 - t) * (u10 - u11);
}

std::vector<double> DiscreteFunction::boundary_values() const {
  if (mesh1_) return {values_.front(), values_.back()};
  std::vector<double> out;
  for (const auto& e : mesh2_->boundary_edges()) out.push_back(values_[e[0]]);
  return out;
}

bool DiscreteFunction::conforms(const BoundaryCondition& bc, double tol) const {
  double scale = 0.0;
  for (double v : values_) scale = std::max(scale, std::abs(v));
  const double slack = tol * std::max(scale, 1e-300);
  const auto trace = boundary_values();
  if (bc.kind == BcKind::Dirichlet)
    return std::all_of(trace.begin(), trace.end(), [&](double v) { return std::abs(v) <= slack; });
  if (bc.kind == BcKind::NonFlux)
    return std::all_of(trace.begin(), trace.end(),
                       [&](double v) { return std::abs(v - trace.front()) <= slack; });
  return true;
}

DiscreteFunction DiscreteFunction::scaled(double t) const {
  DiscreteFunction out = *this;
  for (double& v : out.values_) v *= t;
  return out;
}

DiscreteFunction interpolate(std::shared_ptr<const Mesh1> mesh, const std::function<double(double)>& f) {
  std::vector<double> v;
  v.reserve(mesh->nodes().size());
  for (double x : mesh->nodes()) v.push_back(f(x));
  return DiscreteFunction(std::move(mesh), std::move(v));
}

DiscreteFunction interpolate(std::shared_ptr<const Mesh2> mesh, const std::function<double(Point)>& f) {
  std::vector<double> v;
  v.reserve(mesh->vertices().size());
  for (Point x : mesh->vertices()) v.push_back(f(x));
  return DiscreteFunction(std::move(mesh), std::move(v));
}

double functional_F(const DiscreteFunction& u, const ScaledField& w, double p) {
  Resolution res;
  res.add(w);
  const auto& val = u.values();
  double total = 0.0;
  if (const Mesh1* m = u.mesh1()) {
    const auto& xs = m->nodes();
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const double a = xs[i], b = xs[i + 1], ua = val[i], ub = val[i + 1];
      quadrature_interval(a, b, res, zero_cuts(a, b, ua, ub), [&](double x, double wq) {
        const double ux = ua + (ub - ua) * (x - a) / (b - a);
        total += wq * w(Point{x, 0.0}) * std::pow(std::abs(ux), p);
      });
    }
    return total;
  }
  const Mesh2& m = *u.mesh2();
  for (const auto& t : m.triangles()) {
    const LinearPiece piece = triangle_piece(m, val, t);
    quadrature_triangle(m.vertices()[t[0]], m.vertices()[t[1]], m.vertices()[t[2]], res,
                        [&](Point x, double wq) { total += wq * w(x) * std::pow(std::abs(piece.at(x)), p); });
  }
  return total;
}

double functional_G(const DiscreteFunction& u, const OperatorSpec& op) {
  Resolution res;
  for (const SpatialField* f : op.fields()) res.add(*f);
  const auto& val = u.values();
  double total = 0.0;
  if (const Mesh1* m = u.mesh1()) {
    const auto& xs = m->nodes();
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const Vec2 g{(val[i + 1] - val[i]) / (xs[i + 1] - xs[i]), 0.0};
      if (g.x == 0.0) continue;
      quadrature_interval(xs[i], xs[i + 1], res, {},
                          [&](double x, double wq) { total += wq * op.potential(Point{x, 0.0}, g); });
    }
    return total;
  }
  const Mesh2& m = *u.mesh2();
  for (const auto& t : m.triangles()) {
    const Vec2 g = triangle_piece(m, val, t).grad;
    if (g.x == 0.0 && g.y == 0.0) continue;
    quadrature_triangle(m.vertices()[t[0]], m.vertices()[t[1]], m.vertices()[t[2]], res,
                        [&](Point x, double wq) { total += wq * op.potential(x, g); });
  }
  return total;
}

double functional_H(const DiscreteFunction& u, double p) {
  const auto& val = u.values();
  if (u.mesh1()) return std::pow(std::abs(val.front()), p) + std::pow(std::abs(val.back()), p);
  const Mesh2& m = *u.mesh2();
  Resolution res;
  double total = 0.0;
  for (const auto& e : m.boundary_edges()) {
    const Point a = m.vertices()[e[0]], b = m.vertices()[e[1]];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const double ua = val[e[0]], ub = val[e[1]];
    quadrature_interval(0.0, 1.0, res, zero_cuts(0.0, 1.0, ua, ub), [&](double s, double wq) {
      total += wq * len * std::pow(std::abs(ua + s * (ub - ua)), p);
    });
  }
  return total;
}

double rayleigh_quotient(const DiscreteFunction& u, const ProblemInstance& prob) {
  if (u.dimension() != prob.dimension())
    throw Error(ErrorCode::InvalidArgument, "function and problem dimensions differ");
  const double p = prob.op().p();
  const double g = functional_G(u, prob.op());
  const double fv = functional_F(u, prob.potential(), p);
  double num = g + fv;
  double den = 0.0;
  switch (prob.bc().kind) {
    case BcKind::Dirichlet:
    case BcKind::Neumann:
    case BcKind::NonFlux:
      den = functional_F(u, prob.rho(), p);
      break;
    case BcKind::Robin:
      num += prob.bc().beta * functional_H(u, p);
      den = functional_F(u, prob.rho(), p);
      break;
    case BcKind::DependentBC:
      den = functional_H(u, p) + functional_F(u, prob.rho(), p);
      break;
    case BcKind::Steklov:
      den = functional_H(u, p);
      break;
  }
  if (!(den > 0.0))
    throw Error(ErrorCode::ZeroDenominator,
                std::string("denominator of the ") + to_string(prob.bc().kind) + " quotient vanishes");
  return num / den;
}

}  // namespace homogeig
