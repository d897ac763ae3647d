#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/SparseCore>

#include "homogeig/mesh.hpp"
#include "homogeig/problems.hpp"
#include "homogeig/spectrum.hpp"

namespace homogeig {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Piecewise-linear finite element matrices of one two-dimensional problem
/// with p = 2, before any boundary condition is imposed:
///   K    stiffness,        u'Ku = G(u) = int A grad u . grad u
///   M_rho weighted mass,   u'M_rho u = F(u, rho_eps)
///   M_v  potential mass,   u'M_v u = F(u, V_eps)
///   B    boundary mass,    u'Bu = H(u) = int_{boundary} u^2
struct AssembledSystem {
  std::shared_ptr<const Mesh2> mesh;
  SparseMatrix K;
  SparseMatrix M_rho;
  SparseMatrix M_v;
  SparseMatrix B;
  /// Lower bound for every pencil of the system, min(0, inf V / inf rho).
  double floor = 0.0;
};

struct FemOptions {
  /// Bound on the pencil residual |(K + M_v) u - lambda R u| / |u|.
  double tol = 1e-9;
  /// Reduced systems up to this size are solved densely; larger ones by
  /// shift-invert Lanczos (ARPACK) on a sparse factorization.
  int dense_limit = 500;
  /// Smallest number of cells per unit length of the mesh.
  int min_cells = 16;
  /// Meshes used by reference_spectrum: 2 (h, h/2) or 3 (h, h/2, h/4).
  int richardson_levels = 2;
};

/// Cells per side of the coarsest criss-cross mesh that has at least
/// `min_cells` cells per unit length, puts grid lines on every jump of the
/// piecewise coefficients, and has diameter <= eps / 4.
std::array<int, 2> resolving_cells(const ProblemInstance& prob, int min_cells);
std::shared_ptr<const Mesh2> make_mesh(const ProblemInstance& prob, int min_cells);

/// Assembles the four matrices with the seven-point degree-5 triangle rule,
/// split exactly along coefficient jumps. Throws MESH_TOO_COARSE when the
/// element diameter exceeds eps / 4, and INVALID_ARGUMENT unless N = 2 and
/// p = 2.
AssembledSystem assemble(const ProblemInstance& prob, std::shared_ptr<const Mesh2> mesh);

/// Eigenpairs of one pencil on the constrained space.
struct FemEigenpairs {
  Spectrum spectrum;
  /// Nodal values of each eigenvector, normalized to u' R u = 1 where R is
  /// the right-hand matrix of the pencil.
  std::vector<DiscreteFunction> modes;
};

/// The k_max smallest eigenvalues of the pencil of `bc`:
///   Dirichlet, Neumann, NonFlux  (K + M_v, M_rho)
///   Robin                        (K + M_v + beta B, M_rho)
///   DependentBC                  (K + M_v, M_rho + B)
///   Steklov                      (K + M_v, B)
/// Dirichlet eliminates boundary vertices; NonFlux ties all boundary
/// vertices to one shared unknown. Steklov is reduced to the boundary, so
/// interior-supported modes (infinite eigenvalues) never appear. Throws
/// SINGULAR_PENCIL when the Steklov boundary space is empty or the
/// interior block is singular.
Spectrum solve_gevp(const AssembledSystem& sys, const BoundaryCondition& bc, int k_max,
                    const FemOptions& opts = {});
FemEigenpairs solve_gevp_modes(const AssembledSystem& sys, const BoundaryCondition& bc, int k_max,
                               const FemOptions& opts = {});

/// Assembles on make_mesh(prob, opts.min_cells) and solves.
Spectrum solve_fem(const ProblemInstance& prob, int k_max, const FemOptions& opts = {});

/// Richardson extrapolation (4 lambda_{h/2} - lambda_h) / 3 from the mesh of
/// solve_fem and its uniform refinement. `errors` holds the estimate
/// |lambda_{h/2} - lambda_h| / 3, which bounds the error of the finer raw
/// value and is pessimistic for the extrapolated one. With three levels the
/// value is extrapolated from h/2 and h/4 and `errors` is the difference of
/// the two extrapolations over 15 (h^4 convergence of extrapolated values).
Spectrum reference_spectrum(const ProblemInstance& prob, int k_max, const FemOptions& opts = {});

/// Plain-text exports for debugging.
///
/// Triplets: a header line "n_rows n_cols nnz" followed by one "i j value"
/// line per stored entry (0-based, column major, values with 17 digits).
/// Mesh: "vertices n" then "x y" lines, "triangles m" then "a b c" lines,
/// "boundary_edges e" then "a b" lines.
void write_triplets(std::ostream& out, const SparseMatrix& m);
void write_mesh(std::ostream& out, const Mesh2& mesh);

}  // namespace homogeig
