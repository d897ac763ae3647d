#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "homogeig/coefficients.hpp"
#include "homogeig/common.hpp"
#include "homogeig/mesh.hpp"
#include "homogeig/operators.hpp"

namespace homogeig {

enum class BcKind { Dirichlet, Neumann, Robin, NonFlux, DependentBC, Steklov };

const char* to_string(BcKind kind);
/// One-letter label: D, N, R, P, B, S.
char bc_letter(BcKind kind);

struct BoundaryCondition {
  BcKind kind = BcKind::Dirichlet;
  /// Robin coefficient, zero for the other kinds.
  double beta = 0.0;

  static BoundaryCondition dirichlet() { return {BcKind::Dirichlet, 0.0}; }
  static BoundaryCondition neumann() { return {BcKind::Neumann, 0.0}; }
  static BoundaryCondition robin(double beta);
  static BoundaryCondition nonflux() { return {BcKind::NonFlux, 0.0}; }
  static BoundaryCondition dependent() { return {BcKind::DependentBC, 0.0}; }
  static BoundaryCondition steklov() { return {BcKind::Steklov, 0.0}; }

  /// "dirichlet", "robin(0.5)", ...
  std::string label() const;
  friend bool operator==(const BoundaryCondition&, const BoundaryCondition&) = default;
};

/// Accepts the lower-case names (dirichlet, neumann, robin, nonflux,
/// dependent, steklov) and the one-letter labels. Throws INVALID_ARGUMENT.
BoundaryCondition parse_bc(const std::string& tag, double beta = 0.0);

/// An eigenvalue problem
///   -div a(x, grad u) + V(x/eps)|u|^{p-2}u = lambda rho(x/eps)|u|^{p-2}u
/// on a domain with one of the six boundary conditions, or its averaged
/// limit when the scale is empty.
class ProblemInstance {
 public:
  ProblemInstance(Domain domain, OperatorSpec op, CoefficientField rho, CoefficientField v,
                  BoundaryCondition bc, Scale eps);

  const Domain& domain() const { return domain_; }
  int dimension() const { return domain_.dimension(); }
  const OperatorSpec& op() const { return op_; }
  const BoundaryCondition& bc() const { return bc_; }
  const Scale& epsilon() const { return eps_; }
  ScaledField rho() const { return ScaledField(rho_, eps_); }
  ScaledField potential() const { return ScaledField(v_, eps_); }
  const CoefficientField& rho_field() const { return rho_; }
  const CoefficientField& potential_field() const { return v_; }

  ProblemInstance at_scale(Scale eps) const;
  ProblemInstance with_bc(BoundaryCondition bc) const;

  /// Whether the convergence theory for this condition assumes a C^1
  /// boundary (all but Dirichlet and NonFlux). Informational only.
  bool theory_assumes_c1_boundary() const;

 private:
  Domain domain_;
  OperatorSpec op_;
  CoefficientField rho_;
  CoefficientField v_;
  BoundaryCondition bc_;
  Scale eps_;
};

/// Continuous piecewise-linear function given by its nodal values.
class DiscreteFunction {
 public:
  DiscreteFunction(std::shared_ptr<const Mesh1> mesh, std::vector<double> values);
  DiscreteFunction(std::shared_ptr<const Mesh2> mesh, std::vector<double> values);

  int dimension() const { return mesh1_ ? 1 : 2; }
  const Mesh1* mesh1() const { return mesh1_.get(); }
  const Mesh2* mesh2() const { return mesh2_.get(); }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double operator()(Point x) const;
  /// Nodal values on the boundary: the two endpoints in 1D, the boundary
  /// vertices in mesh order in 2D.
  std::vector<double> boundary_values() const;
  /// Zero trace for Dirichlet, a single shared boundary value for NonFlux,
  /// anything otherwise. `tol` is relative to the largest nodal value.
  bool conforms(const BoundaryCondition& bc, double tol = 1e-12) const;
  DiscreteFunction scaled(double t) const;

 private:
  std::shared_ptr<const Mesh1> mesh1_;
  std::shared_ptr<const Mesh2> mesh2_;
  std::vector<double> values_;
};

DiscreteFunction interpolate(std::shared_ptr<const Mesh1> mesh, const std::function<double(double)>& f);
DiscreteFunction interpolate(std::shared_ptr<const Mesh2> mesh, const std::function<double(Point)>& f);

/// Integral of w |u|^p.
double functional_F(const DiscreteFunction& u, const ScaledField& w, double p);
/// Integral of Phi(x, grad u).
double functional_G(const DiscreteFunction& u, const OperatorSpec& op);
/// Boundary integral of |u|^p (the sum over the two endpoints in 1D).
double functional_H(const DiscreteFunction& u, double p);

/// The quotient whose critical values are the eigenvalues of `prob`:
///   D, N, P: (G + F_V) / F_rho      R: (beta H + G + F_V) / F_rho
///   B: (G + F_V) / (H + F_rho)       S: (G + F_V) / H
/// Throws ZERO_DENOMINATOR when the denominator vanishes.
double rayleigh_quotient(const DiscreteFunction& u, const ProblemInstance& prob);

}  // namespace homogeig
