#pragma once

// Exact eigenvalues of -(A u')' + V u = lambda rho u on [0, L] with
// piecewise-constant coefficients, from products of 2x2 transfer matrices
// acting on (u, A u').

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace testsupport {

struct Piece {
  double length, a, rho, v;
};

using Mat2 = std::array<double, 4>;  // row major

inline Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}

inline Mat2 monodromy(const std::vector<Piece>& pieces, double lambda) {
  Mat2 m{1, 0, 0, 1};
  for (const Piece& pc : pieces) {
    const double k2 = (lambda * pc.rho - pc.v) / pc.a;
    const double h = pc.length;
    Mat2 t;
    if (k2 > 0) {
      const double k = std::sqrt(k2);
      t = {std::cos(k * h), std::sin(k * h) / (pc.a * k), -pc.a * k * std::sin(k * h), std::cos(k * h)};
    } else if (k2 < 0) {
      const double k = std::sqrt(-k2);
      t = {std::cosh(k * h), std::sinh(k * h) / (pc.a * k), pc.a * k * std::sinh(k * h), std::cosh(k * h)};
    } else {
      t = {1, h / pc.a, 0, 1};
    }
    m = mul(t, m);
  }
  return m;
}

// Roots of f in [lo, hi] found by a uniform scan of n cells plus bisection.
inline std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi, int n) {
  std::vector<double> roots;
  double a = lo, fa = f(a);
  for (int i = 1; i <= n; ++i) {
    const double b = lo + (hi - lo) * i / n, fb = f(b);
    if ((fa < 0) != (fb < 0)) {
      double x = a, y = b, fx = fa;
      for (int it = 0; it < 200 && y - x > 1e-15 * std::max(1.0, std::abs(y)); ++it) {
        const double m = 0.5 * (x + y), fm = f(m);
        if ((fm < 0) == (fx < 0)) {
          x = m;
          fx = fm;
        } else {
          y = m;
        }
      }
      roots.push_back(0.5 * (x + y));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

// Separated conditions: A u'(0) = beta0 u(0) and A u'(L) = -beta1 u(L);
// beta = infinity means Dirichlet.
inline std::vector<double> separated_eigenvalues(const std::vector<Piece>& pieces, double beta0,
                                                 double beta1, double lo, double hi, int n = 20000) {
  const bool d0 = std::isinf(beta0), d1 = std::isinf(beta1);
  auto f = [&](double lam) {
    const Mat2 m = monodromy(pieces, lam);
    const double u0 = d0 ? 0.0 : 1.0, f0 = d0 ? 1.0 : beta0;
    const double u = m[0] * u0 + m[1] * f0, flux = m[2] * u0 + m[3] * f0;
    return d1 ? u : flux + beta1 * u;
  };
  return scan_roots(f, lo, hi, n);
}

// Periodic eigenvalues: trace of the monodromy equals 2.
inline std::vector<double> periodic_eigenvalues(const std::vector<Piece>& pieces, double lo, double hi,
                                                int n = 20000) {
  auto f = [&](double lam) {
    const Mat2 m = monodromy(pieces, lam);
    return m[0] + m[3] - 2.0;
  };
  return scan_roots(f, lo, hi, n);
}

}  // namespace testsupport
