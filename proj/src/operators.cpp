#include "homogeig/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace homogeig {
namespace {

constexpr double kTiny = 1e-300;

void check_exponent_and_bounds(double p, double alpha, double beta) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw Error(ErrorCode::InvalidArgument, "operator exponent p must be in (1, inf)");
  if (!(alpha > 0.0) || !(alpha <= beta) || !std::isfinite(beta))
    throw Error(ErrorCode::InvalidArgument, "operator bounds need 0 < alpha <= beta");
}

}  // namespace

OperatorSpec OperatorSpec::scalar(double p, SpatialField a, double alpha, double beta) {
  check_exponent_and_bounds(p, alpha, beta);
  if (a.lo() < alpha || a.hi() > beta)
    throw Error(ErrorCode::InvalidArgument,
                "diffusion coefficient bounds [" + std::to_string(a.lo()) + ", " +
                    std::to_string(a.hi()) + "] not inside [alpha, beta]");
  OperatorSpec op;
  op.p_ = p;
  op.alpha_ = alpha;
  op.beta_ = beta;
  op.a11_ = std::move(a);
  return op;
}

OperatorSpec OperatorSpec::matrix(SpatialField a11, SpatialField a12, SpatialField a22,
                                  double alpha, double beta) {
  check_exponent_and_bounds(2.0, alpha, beta);
  OperatorSpec op;
  op.p_ = 2.0;
  op.alpha_ = alpha;
  op.beta_ = beta;
  op.matrix_ = true;
  op.a11_ = std::move(a11);
  op.a12_ = std::move(a12);
  op.a22_ = std::move(a22);
  return op;
}

OperatorSpec OperatorSpec::p_laplacian(double p) { return scalar(p, SpatialField(1.0), 1.0, 1.0); }

double OperatorSpec::coefficient(Point x) const {
  if (matrix_) throw Error(ErrorCode::InvalidArgument, "matrix operator has no scalar coefficient");
  return a11_(x);
}

Matrix2 OperatorSpec::matrix_coefficient(Point x) const {
  if (!matrix_) {
    const double a = a11_(x);
    return {a, 0.0, a};
  }
  return {a11_(x), a12_(x), a22_(x)};
}

std::vector<const SpatialField*> OperatorSpec::fields() const {
  if (matrix_) return {&a11_, &a12_, &a22_};
  return {&a11_};
}

Vec2 OperatorSpec::apply(Point x, Vec2 xi) const {
  if (matrix_) return matrix_coefficient(x) * xi;
  const double r = norm(xi);
  if (r == 0.0) return {0.0, 0.0};
  return (a11_(x) * std::pow(r, p_ - 2.0)) * xi;
}

double OperatorSpec::potential(Point x, Vec2 xi) const {
  if (matrix_) return dot(xi, matrix_coefficient(x) * xi);
  return a11_(x) * std::pow(norm(xi), p_);
}

std::vector<double> OperatorSpec::breakpoints(int axis, double a, double b) const {
  std::vector<double> out = a11_.breakpoints(axis, a, b);
  if (matrix_) {
    for (const SpatialField* f : {&a12_, &a22_}) {
      const auto more = f->breakpoints(axis, a, b);
      out.insert(out.end(), more.begin(), more.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return out;
}

Vec2 apply(const OperatorSpec& op, Point x, Vec2 xi) { return op.apply(x, xi); }
double potential(const OperatorSpec& op, Point x, Vec2 xi) { return op.potential(x, xi); }

DiffusionLaw diffusion_law(const OperatorSpec& op, int dimension) {
  DiffusionLaw law;
  law.dimension = dimension;
  law.p = op.p();
  law.alpha = op.alpha();
  law.beta = op.beta();
  law.flux = [op, dimension](Point x, Vec2 xi) {
    if (dimension == 1) {
      x.y = 0.0;
      xi.y = 0.0;
    }
    return op.apply(x, xi);
  };
  return law;
}

std::vector<std::string> HypothesisReport::failing(double threshold) const {
  std::vector<std::string> out;
  const std::pair<const char*, double> order[] = {
      {"H5", h5_oddness},    {"H4", h4_homogeneity}, {"H1", h1_monotonicity},
      {"H2", h2_coercivity}, {"H3", h3_continuity},  {"H8", h8_strict},
  };
  for (const auto& [id, r] : order)
    if (!(r <= threshold)) out.emplace_back(id);
  return out;
}

HypothesisReport sample_hypotheses(const DiffusionLaw& law, const Domain& domain, int n_samples,
                                   std::uint64_t seed) {
  if (n_samples < 1) throw Error(ErrorCode::InvalidArgument, "n_samples must be >= 1");
  if (!law.flux) throw Error(ErrorCode::InvalidArgument, "diffusion law has no flux");
  const double p = law.p;
  const double gamma = std::max(2.0, p);
  const double delta = std::min(p / 2.0, p - 1.0);
  const bool two_d = law.dimension == 2;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw_point = [&] {
    Point x{domain.lx() * unit(rng), 0.0};
    if (two_d) x.y = domain.ly() * unit(rng);
    return x;
  };
  auto draw_vector = [&] {
    const double mag = std::pow(10.0, -2.0 + 4.0 * unit(rng));
    if (!two_d) return Vec2{unit(rng) < 0.5 ? -mag : mag, 0.0};
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    return Vec2{mag * std::cos(angle), mag * std::sin(angle)};
  };

  HypothesisReport rep;
  rep.samples = n_samples;
  double alpha8 = INFINITY;
  std::vector<double> h6;
  h6.reserve(static_cast<std::size_t>(n_samples));

  for (int s = 0; s < n_samples; ++s) {
    const Point x = draw_point();
    const Vec2 xi1 = draw_vector();
    Vec2 xi2 = draw_vector();
    if (s % 4 == 3) {
      // Nearby pairs probe the local strict monotonicity.
      const double shrink = std::pow(10.0, -3.0 * unit(rng));
      xi2 = xi1 + shrink * (xi2 - xi1);
    }
    const double t = std::pow(10.0, -1.0 + 2.0 * unit(rng));

    const Vec2 a1 = law.flux(x, xi1);
    const Vec2 a2 = law.flux(x, xi2);
    const double n1 = norm(xi1);
    const double n2 = norm(xi2);

    const Vec2 da = a1 - a2;
    const Vec2 dxi = xi1 - xi2;
    const double mono = dot(da, dxi);
    const double mono_scale = (norm(a1) + norm(a2)) * (n1 + n2) + kTiny;
    rep.h1_monotonicity = std::max(rep.h1_monotonicity, std::max(0.0, -mono) / mono_scale);

    const double coer = law.alpha * std::pow(n1, p);
    rep.h2_coercivity = std::max(rep.h2_coercivity, std::max(0.0, coer - dot(a1, xi1)) / (coer + kTiny));

    const double cont = law.beta * std::pow(n1, p - 1.0);
    rep.h3_continuity = std::max(rep.h3_continuity, std::max(0.0, norm(a1) - cont) / (cont + kTiny));

    const Vec2 at = law.flux(x, t * xi1);
    const double tp = std::pow(t, p - 1.0);
    rep.h4_homogeneity = std::max(
        rep.h4_homogeneity, norm(at - tp * a1) / (norm(at) + tp * norm(a1) + kTiny));

    const Vec2 am = law.flux(x, -xi1);
    rep.h5_oddness = std::max(rep.h5_oddness, norm(am + a1) / (norm(am) + norm(a1) + kTiny));

    const double psi = dot(a1, xi1) + dot(a2, xi2);
    const double dn = norm(dxi);
    if (dn > 0.0 && psi > 0.0) {
      const double denom8 = std::pow(dn, gamma) * std::pow(psi, 1.0 - gamma / p);
      alpha8 = std::min(alpha8, mono / denom8);
      if (mono > 0.0) {
        const double rhs = std::pow(psi, (p - 1.0 - delta) / p) * std::pow(mono, delta / p);
        h6.push_back(norm(da) / rhs);
      }
    }
  }
  rep.h7_cyclic = rep.h1_monotonicity;
  rep.h8_alpha_estimate = std::isfinite(alpha8) ? alpha8 : 0.0;
  rep.h8_strict = std::max(0.0, -rep.h8_alpha_estimate);
  if (!h6.empty()) {
    std::sort(h6.begin(), h6.end());
    rep.h6_ratio_max = h6.back();
    rep.h6_ratio_median = h6[h6.size() / 2];
  }
  return rep;
}

HypothesisRejected::HypothesisRejected(std::string hypothesis, HypothesisReport report)
    : Error(ErrorCode::Rejected, hypothesis + " violated beyond 1e-6"),
      hypothesis_(std::move(hypothesis)),
      report_(report) {}

HypothesisReport check_hypotheses(const DiffusionLaw& law, const Domain& domain, int n_samples,
                                  std::uint64_t seed) {
  HypothesisReport rep = sample_hypotheses(law, domain, n_samples, seed);
  const auto bad = rep.failing(1e-6);
  if (!bad.empty()) throw HypothesisRejected(bad.front(), rep);
  return rep;
}

HypothesisReport check_hypotheses(const OperatorSpec& op, const Domain& domain, int n_samples,
                                  std::uint64_t seed) {
  return check_hypotheses(diffusion_law(op, domain.dimension()), domain, n_samples, seed);
}

}  // namespace homogeig
