#pragma once

#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace homogeig::detail {

struct Pairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // columns
  std::string solver;
};

/// The k eigenpairs of A x = lambda R x nearest above sigma, by shift-invert
/// Lanczos (ARPACK mode 3). A - sigma R must be positive definite and R
/// positive semidefinite; infinite eigenvalues of a singular R are never
/// returned. Calls are serialized because ARPACK keeps global state.
Pairs shift_invert(const Eigen::SparseMatrix<double>& a, const Eigen::SparseMatrix<double>& r, int k, double sigma,
                   double tol);

}  // namespace homogeig::detail
