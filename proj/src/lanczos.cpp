#include "lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <vector>

#include <Eigen/SparseCholesky>

#include "homogeig/common.hpp"

// arpack.h pulls in <complex.h>, whose `I` macro breaks C++ headers
// included after it, so it stays last and alone in this file.
#include <arpack/arpack.hpp>
#undef I

namespace homogeig::detail {
namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

std::mutex& arpack_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Pairs shift_invert(const SparseMatrix& a, const SparseMatrix& r, int k, double sigma, double tol) {
  const int n = static_cast<int>(a.rows());
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  SparseMatrix shifted = a - sigma * r;
  ldlt.compute(shifted);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any())
    throw Error(ErrorCode::SingularPencil, "shifted pencil is not positive definite");

  const int nev = k;
  const int ncv = std::min(n, std::max(2 * k + 1, k + 24));
  const int lworkl = ncv * (ncv + 8);
  std::vector<double> resid(n), v(static_cast<std::size_t>(n) * ncv), workd(3 * static_cast<std::size_t>(n)),
      workl(lworkl);
  // Fixed start vector so that reruns are reproducible.
  for (int i = 0; i < n; ++i) resid[i] = 1.0 + 0.5 * std::sin(0.7 * i + 0.3) + 0.25 * std::cos(1.9 * i);
  a_int iparam[11] = {}, ipntr[11] = {};
  iparam[0] = 1;
  iparam[2] = 3000;
  iparam[6] = 3;
  a_int ido = 0, info = 1;
  const double arpack_tol = std::min(tol, 1e-12);

  std::lock_guard<std::mutex> lock(arpack_mutex());
  Eigen::VectorXd tmp(n);
  while (true) {
    arpack::saupd(ido, arpack::bmat::generalized, n, arpack::which::largest_magnitude, nev, arpack_tol,
                  resid.data(), ncv, v.data(), n, iparam, ipntr, workd.data(), workl.data(), lworkl, info);
    Eigen::Map<Eigen::VectorXd> x(workd.data() + ipntr[0] - 1, n);
    Eigen::Map<Eigen::VectorXd> y(workd.data() + ipntr[1] - 1, n);
    if (ido == -1) {
      tmp = r * x;
      y = ldlt.solve(tmp);
    } else if (ido == 1) {
      Eigen::Map<Eigen::VectorXd> rx(workd.data() + ipntr[2] - 1, n);
      y = ldlt.solve(Eigen::VectorXd(rx));
    } else if (ido == 2) {
      y = r * x;
    } else {
      break;
    }
  }
  if (info == 1) throw Error(ErrorCode::NoConvergence, k, "Lanczos iteration hit its limit");
  if (info < 0) throw Error(ErrorCode::NoConvergence, k, "ARPACK saupd failed with info " + std::to_string(info));

  std::vector<a_int> select(ncv, 1);
  std::vector<double> d(nev);
  std::vector<double> z(static_cast<std::size_t>(n) * nev);
  a_int einfo = 0;
  arpack::seupd(1, arpack::howmny::ritz_vectors, select.data(), d.data(), z.data(), n, sigma,
                arpack::bmat::generalized, n, arpack::which::largest_magnitude, nev, arpack_tol, resid.data(),
                ncv, v.data(), n, iparam, ipntr, workd.data(), workl.data(), lworkl, einfo);
  if (einfo != 0) throw Error(ErrorCode::NoConvergence, k, "ARPACK seupd failed with info " + std::to_string(einfo));
  const int found = iparam[4];
  if (found < nev) throw Error(ErrorCode::NoConvergence, found + 1, "Lanczos converged on too few eigenpairs");

  std::vector<int> order(nev);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return d[i] < d[j]; });
  Pairs out;
  out.values.resize(nev);
  out.vectors.resize(n, nev);
  for (int c = 0; c < nev; ++c) {
    out.values[c] = d[order[c]];
    out.vectors.col(c) = Eigen::Map<Eigen::VectorXd>(z.data() + static_cast<std::size_t>(order[c]) * n, n);
  }
  out.solver = "fem-p1-arpack";
  return out;
}

}  // namespace homogeig::detail
