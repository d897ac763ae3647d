#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace homogeig {

/// pi_p = 2 pi / (p sin(pi / p)), the half period of sin_p.
double pi_p(double p);

/// Generalized trigonometric functions for the one-dimensional p-Laplacian.
///
/// sin_p is the solution of (phi_p(y'))' + (p - 1) phi_p(y) = 0 with
/// y(0) = 0, y'(0) = 1, where phi_p(t) = |t|^{p-2} t. It is odd, has
/// period 2 pi_p, and with cos_p = sin_p' satisfies
/// |sin_p|^p + |cos_p|^p = 1.
///
/// On [0, pi_p / 2] the inverse is an incomplete beta function,
///   arcsin_p(s) = (pi_p / 2) I_{s^p}(1/p, 1 - 1/p).
/// Values are served from piecewise Chebyshev fits of that inverse in
/// variables in which it is analytic, so a call costs one pow and a short
/// polynomial evaluation.
class PTrig {
 public:
  explicit PTrig(double p);
  /// Shared instance per exponent.
  static std::shared_ptr<const PTrig> get(double p);

  double p() const { return p_; }
  double pi_p() const { return pi_p_; }

  /// |sin_p(theta)|^p; |cos_p(theta)|^p is one minus this.
  double sigma(double theta) const;
  double sin(double theta) const;
  double cos(double theta) const;
  /// Inverse of sin_p on [0, 1] -> [0, pi_p / 2].
  double arcsin(double s) const;
  /// The angle in [0, pi_p / 2] with |sin_p|^p = sigma.
  double angle_of_sigma(double sigma) const;

  /// Slow reference value of |sin_p|^p on [0, pi_p / 2] straight from the
  /// inverse incomplete beta function.
  double sigma_reference(double theta) const;

 private:
  struct Piece {
    double lo, hi;
    std::vector<double> c;
  };
  static std::vector<Piece> fit(const std::function<double(double)>& f, double lo, double hi);
  static double eval(const std::vector<Piece>& pieces, double x);

  // sigma on [0, q]: theta <= theta_mid uses z = (theta / q)^p and returns
  // sigma / z; theta > theta_mid uses w = ((q - theta) / q)^{p / (p - 1)}
  // and returns (1 - sigma) / w.
  double reduced_sigma(double phi) const;

  double p_;
  double pi_p_;
  double q_;
  double theta_mid_;
  std::vector<Piece> lower_;
  std::vector<Piece> upper_;
};

}  // namespace homogeig
