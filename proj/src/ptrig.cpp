#include "homogeig/ptrig.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "homogeig/common.hpp"

namespace homogeig {
namespace {

constexpr int kNodes = 24;
// The reference inverse incomplete beta values carry noise near 5e-15.
constexpr double kFitTol = 2e-14;
constexpr int kMaxDepth = 8;

std::vector<double> chebyshev_coefficients(const std::function<double(double)>& f, double lo, double hi) {
  std::vector<double> fx(kNodes), c(kNodes, 0.0);
  for (int j = 0; j < kNodes; ++j) {
    const double t = std::cos(std::numbers::pi * (j + 0.5) / kNodes);
    fx[j] = f(0.5 * (lo + hi) + 0.5 * (hi - lo) * t);
  }
  for (int k = 0; k < kNodes; ++k) {
    double s = 0.0;
    for (int j = 0; j < kNodes; ++j) s += fx[j] * std::cos(std::numbers::pi * k * (j + 0.5) / kNodes);
    c[k] = 2.0 * s / kNodes;
  }
  c[0] *= 0.5;
  return c;
}

double clenshaw(const std::vector<double>& c, double t) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size() - 1; k >= 1; --k) {
    const double b0 = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}

}  // namespace

double pi_p(double p) {
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidArgument, "pi_p needs p > 1");
  return 2.0 * std::numbers::pi / (p * std::sin(std::numbers::pi / p));
}

std::vector<PTrig::Piece> PTrig::fit(const std::function<double(double)>& f, double lo, double hi) {
  std::vector<Piece> out;
  struct Job {
    double lo, hi;
    int depth;
  };
  std::vector<Job> stack{{lo, hi, 0}};
  while (!stack.empty()) {
    const Job job = stack.back();
    stack.pop_back();
    Piece piece{job.lo, job.hi, chebyshev_coefficients(f, job.lo, job.hi)};
    double err = 0.0, scale = 0.0;
    for (int j = 0; j <= 2 * kNodes; ++j) {
      const double t = -1.0 + 2.0 * (j + 0.37) / (2 * kNodes + 1);
      const double x = 0.5 * (job.lo + job.hi) + 0.5 * (job.hi - job.lo) * t;
      const double want = f(x);
      err = std::max(err, std::abs(clenshaw(piece.c, t) - want));
      scale = std::max(scale, std::abs(want));
    }
    if (err > kFitTol * scale && job.depth < kMaxDepth) {
      const double mid = 0.5 * (job.lo + job.hi);
      // Push the upper half first so pieces come out in increasing order.
      stack.push_back({mid, job.hi, job.depth + 1});
      stack.push_back({job.lo, mid, job.depth + 1});
    } else {
      out.push_back(std::move(piece));
    }
  }
  return out;
}

double PTrig::eval(const std::vector<Piece>& pieces, double x) {
  std::size_t lo = 0, hi = pieces.size();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (x < pieces[mid].lo) hi = mid; else lo = mid;
  }
  const Piece& pc = pieces[lo];
  const double t = std::clamp((2.0 * x - pc.lo - pc.hi) / (pc.hi - pc.lo), -1.0, 1.0);
  return clenshaw(pc.c, t);
}

PTrig::PTrig(double p) : p_(p), pi_p_(homogeig::pi_p(p)), q_(0.5 * pi_p_) {
  const double a = 1.0 / p, b = 1.0 - 1.0 / p;
  theta_mid_ = q_ * boost::math::ibeta(a, b, 0.5);
  const double z_mid = std::pow(theta_mid_ / q_, p);
  const double w_mid = std::pow((q_ - theta_mid_) / q_, p / (p - 1.0));
  lower_ = fit([=](double z) { return boost::math::ibeta_inv(a, b, std::pow(z, 1.0 / p)) / z; }, 0.0, z_mid);
  upper_ = fit([=](double w) { return boost::math::ibeta_inv(b, a, std::pow(w, (p - 1.0) / p)) / w; }, 0.0,
               w_mid);
}

std::shared_ptr<const PTrig> PTrig::get(double p) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<const PTrig>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[p];
  if (!slot) slot = std::make_shared<const PTrig>(p);
  return slot;
}

double PTrig::reduced_sigma(double phi) const {
  if (phi <= theta_mid_) {
    const double z = std::pow(phi / q_, p_);
    return z * eval(lower_, z);
  }
  const double w = std::pow((q_ - phi) / q_, p_ / (p_ - 1.0));
  return 1.0 - w * eval(upper_, w);
}

double PTrig::sigma(double theta) const {
  double phi = theta - std::floor(theta / pi_p_) * pi_p_;
  if (phi > q_) phi = pi_p_ - phi;
  return reduced_sigma(std::clamp(phi, 0.0, q_));
}

double PTrig::sin(double theta) const {
  const double n = std::floor(theta / pi_p_);
  double phi = theta - n * pi_p_;
  if (phi > q_) phi = pi_p_ - phi;
  const double s = std::pow(reduced_sigma(std::clamp(phi, 0.0, q_)), 1.0 / p_);
  return std::fmod(n, 2.0) == 0.0 ? s : -s;
}

double PTrig::cos(double theta) const {
  const double n = std::floor(theta / pi_p_);
  const double raw = theta - n * pi_p_;
  const double phi = std::clamp(raw > q_ ? pi_p_ - raw : raw, 0.0, q_);
  double c;
  if (phi <= theta_mid_) {
    c = 1.0 - reduced_sigma(phi);
  } else {
    const double w = std::pow((q_ - phi) / q_, p_ / (p_ - 1.0));
    c = w * eval(upper_, w);
  }
  c = std::pow(c, 1.0 / p_);
  if (raw > q_) c = -c;
  return std::fmod(n, 2.0) == 0.0 ? c : -c;
}

double PTrig::arcsin(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorCode::InvalidArgument, "arcsin_p needs s in [0, 1]");
  return angle_of_sigma(std::pow(s, p_));
}

double PTrig::angle_of_sigma(double sigma) const {
  if (sigma <= 0.0) return 0.0;
  if (sigma >= 1.0) return q_;
  if (sigma <= 0.5) return q_ * boost::math::ibeta(1.0 / p_, 1.0 - 1.0 / p_, sigma);
  return q_ * (1.0 - boost::math::ibeta(1.0 - 1.0 / p_, 1.0 / p_, 1.0 - sigma));
}

double PTrig::sigma_reference(double theta) const {
  return boost::math::ibeta_inv(1.0 / p_, 1.0 - 1.0 / p_, std::clamp(theta / q_, 0.0, 1.0));
}

}  // namespace homogeig
