#pragma once

// Shooting on the first-order system for (u, phi_p(u')) with layered
// coefficients, independent of the Pruefer angle and of p-trig functions.

#include <array>
#include <cmath>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "support/transfer.hpp"

namespace testsupport {

// Terminal value that vanishes at an eigenvalue: u(L) for Dirichlet
// (started from u = 0, phi_p(u') = 1) or phi_p(u'(L)) for Neumann (started
// from u = 1, u' = 0).
inline double direct_terminal(const std::vector<Piece>& pieces, double p, double lambda, bool dirichlet) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 2>;
  State y = dirichlet ? State{0.0, 1.0} : State{1.0, 0.0};
  double x = 0.0;
  for (const Piece& pc : pieces) {
    auto sys = [&](const State& s, State& d, double) {
      d[0] = std::copysign(std::pow(std::abs(s[1]), 1.0 / (p - 1.0)), s[1]) / std::pow(pc.a, 1.0 / (p - 1.0));
      d[1] = (pc.v - lambda * pc.rho) * std::copysign(std::pow(std::abs(s[0]), p - 1.0), s[0]);
    };
    ode::integrate_adaptive(ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>()), sys, y, x,
                            x + pc.length, 1e-4);
    x += pc.length;
  }
  return dirichlet ? y[0] : y[1];
}

}  // namespace testsupport
