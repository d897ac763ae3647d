#include "homogeig/solver1d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

namespace homogeig {
namespace {

namespace ode = boost::numeric::odeint;

bool frozen(const ScaledField& f) { return f.averaged() || f.base().kind() != FieldKind::Trigonometric; }
bool frozen(const SpatialField& f) { return f.field() && f.field()->kind() != FieldKind::Trigonometric; }

struct Coeffs {
  double a;  // A^{1/(p-1)}
  double rho;
  double v;
};

/// The Pruefer system of one problem: coefficient segments, the p-trig
/// tables and the integrators.
class PhaseModel {
 public:
  PhaseModel(const ProblemInstance& prob, double ode_tol)
      : op_(prob.op()),
        rho_(prob.rho()),
        v_(prob.potential()),
        p_(prob.op().p()),
        length_(prob.domain().lx()),
        trig_(PTrig::get(prob.op().p())),
        ode_tol_(ode_tol),
        a_frozen_(frozen(prob.op().scalar_field())),
        rho_frozen_(frozen(rho_)),
        v_frozen_(frozen(v_)) {
    std::vector<double> cuts = op_.breakpoints(0, 0.0, length_);
    for (const ScaledField* f : {&rho_, &v_}) {
      const auto more = f->breakpoints(0, 0.0, length_);
      cuts.insert(cuts.end(), more.begin(), more.end());
    }
    cuts.push_back(0.0);
    cuts.push_back(length_);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [&](double x, double y) { return y - x <= 1e-14 * length_; }),
               cuts.end());
    cuts.back() = length_;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      Segment s{cuts[i], cuts[i + 1], {}};
      s.frozen = eval(0.5 * (s.a + s.b));
      segments_.push_back(s);
    }
  }

  double p() const { return p_; }
  double length() const { return length_; }
  const PTrig& trig() const { return *trig_; }
  const ScaledField& rho() const { return rho_; }
  const ScaledField& potential() const { return v_; }
  const std::vector<double> breakpoints() const {
    std::vector<double> out;
    for (const auto& s : segments_) out.push_back(s.b);
    out.pop_back();
    return out;
  }

  Coeffs eval(double x) const {
    const Point pt{x, 0.0};
    return {std::pow(op_.scalar_field()(pt), 1.0 / (p_ - 1.0)), rho_(pt), v_(pt)};
  }

  Coeffs at(double x, const Coeffs& seg) const {
    Coeffs c = seg;
    if (a_frozen_ && rho_frozen_ && v_frozen_) return c;
    const Point pt{x, 0.0};
    if (!a_frozen_) c.a = std::pow(op_.scalar_field()(pt), 1.0 / (p_ - 1.0));
    if (!rho_frozen_) c.rho = rho_(pt);
    if (!v_frozen_) c.v = v_(pt);
    return c;
  }

  /// Extremes of the coefficients over the domain.
  double rho_lo() const { return rho_.lo(); }
  double rho_hi() const { return rho_.hi(); }
  double v_lo() const { return v_.lo(); }
  double v_hi() const { return v_.hi(); }
  double a_hi() const { return op_.scalar_field().hi(); }
  double a_mean() const {
    if (const CoefficientField* f = op_.scalar_field().field()) return f->average();
    double s = 0.0;
    for (int i = 0; i < 64; ++i) s += op_.scalar_field()(Point{(i + 0.5) * length_ / 64, 0.0});
    return s / 64;
  }

  /// theta(L) from theta(0) = theta0. Optional samples of the trajectory.
  double theta_end(double lambda, double s, double theta0, std::vector<double>* xs = nullptr,
                   std::vector<double>* ths = nullptr) const {
    std::array<double, 1> y{theta0};
    const double sp = std::pow(s, p_ - 1.0) / (p_ - 1.0);
    run<1>(y, [&](const std::array<double, 1>& st, std::array<double, 1>& dy, double x, const Coeffs& seg) {
      const Coeffs c = at(x, seg);
      const double sig = trig_->sigma(st[0]);
      dy[0] = (1.0 - sig) / (s * c.a) + sp * (lambda * c.rho - c.v) * sig;
    }, {}, [&](double x, const std::array<double, 1>& st) {
      if (xs) {
        xs->push_back(x);
        ths->push_back(st[0]);
      }
    });
    return y[0];
  }

  /// (theta, log r, integral of rho |u|^p) at each requested stop point
  /// (sorted, within [0, L]).
  std::vector<std::array<double, 3>> trajectory(double lambda, double s, double theta0,
                                                const std::vector<double>& stops) const {
    std::array<double, 3> y{theta0, 0.0, 0.0};
    const double sp = std::pow(s, p_ - 1.0) / (p_ - 1.0);
    std::vector<std::array<double, 3>> out;
    out.reserve(stops.size());
    run<3>(y, [&](const std::array<double, 3>& st, std::array<double, 3>& dy, double x, const Coeffs& seg) {
      const Coeffs c = at(x, seg);
      const double sig = trig_->sigma(st[0]);
      dy[0] = (1.0 - sig) / (s * c.a) + sp * (lambda * c.rho - c.v) * sig;
      const double sn = trig_->sin(st[0]), cs = trig_->cos(st[0]);
      const double phi_s = std::copysign(std::pow(std::abs(sn), p_ - 1.0), sn);
      dy[1] = phi_s * cs * (1.0 / (s * c.a) - sp * (lambda * c.rho - c.v));
      dy[2] = c.rho * std::exp(p_ * st[1]) * sig;
    }, stops, [&](double, const std::array<double, 3>& st) { out.push_back(st); });
    return out;
  }

 private:
  struct Segment {
    double a, b;
    Coeffs frozen;
  };

  // Integrates over [0, L], restarting at segment ends; `observe` is
  // called at x = 0, at each stop point and at every segment end when no
  // stops are given.
  template <std::size_t N, class Rhs, class Observe>
  void run(std::array<double, N>& y, Rhs&& rhs, const std::vector<double>& stops, Observe&& observe) const {
    using State = std::array<double, N>;
    auto stepper = ode::make_controlled(ode_tol_, ode_tol_, ode::runge_kutta_dopri5<State>());
    double dt = std::min(length_, 0.05);
    std::size_t next_stop = 0;
    if (stops.empty()) observe(0.0, y);
    while (next_stop < stops.size() && stops[next_stop] <= 0.0) observe(stops[next_stop++], y);
    long steps = 0;
    for (const Segment& seg : segments_) {
      auto sys = [&](const State& st, State& dy, double x) { rhs(st, dy, x, seg.frozen); };
      stepper.reset();
      double x = seg.a;
      while (x < seg.b) {
        double end = seg.b;
        if (next_stop < stops.size() && stops[next_stop] < end) end = stops[next_stop];
        while (x < end) {
          double h = std::min(dt, end - x);
          const bool last = h >= end - x;
          double xt = x;
          if (stepper.try_step(sys, y, xt, h) == ode::success) {
            if (last) xt = end;
            x = xt;
            if (!last || h > dt) dt = h;
          } else {
            dt = h;
          }
          if (++steps > 50'000'000)
            throw Error(ErrorCode::NoConvergence, "phase integration exceeded the step budget");
        }
        if (next_stop < stops.size() && stops[next_stop] <= x) {
          while (next_stop < stops.size() && stops[next_stop] <= x) {
            observe(stops[next_stop], y);
            ++next_stop;
          }
        }
      }
      if (stops.empty()) observe(seg.b, y);
    }
  }

  OperatorSpec op_;
  ScaledField rho_;
  ScaledField v_;
  double p_;
  double length_;
  std::shared_ptr<const PTrig> trig_;
  double ode_tol_;
  bool a_frozen_, rho_frozen_, v_frozen_;
  std::vector<Segment> segments_;
};

double ode_tolerance(double tol) { return std::clamp(tol / 100.0, 1e-13, 1e-6); }

/// Pruefer scale that balances the two terms of the phase speed for the
/// k-th mode of the averaged constant-coefficient problem.
double pruefer_scale(const PhaseModel& m, int k) {
  const double p = m.p();
  const double amean = m.a_mean();
  const double lam_term = amean * (p - 1.0) * std::pow(k * m.trig().pi_p() / m.length(), p);
  return std::pow((p - 1.0) / (std::pow(amean, 1.0 / (p - 1.0)) * lam_term), 1.0 / p);
}

/// Every eigenvalue of D, N, R and P is at least this.
double spectrum_floor(const PhaseModel& m) {
  const double v = m.v_lo();
  return v >= 0.0 ? v / m.rho_hi() : v / m.rho_lo();
}

/// Upper bound for the k-th Dirichlet eigenvalue, hence for all four
/// conditions, by comparison with the extreme constant coefficients.
double dirichlet_ceiling(const PhaseModel& m, int k) {
  const double p = m.p();
  const double top = std::max(m.v_hi(), 0.0) + m.a_hi() * (p - 1.0) * std::pow(k * m.trig().pi_p() / m.length(), p);
  return top / m.rho_lo();
}

struct RootOutcome {
  double lambda;
  double width;
};

/// Finds a root of the nondecreasing function g on [lo, hi] (g(lo) < 0),
/// extending hi by doubling up to the cap. Asserts monotonicity of the
/// sampled values.
template <class G>
RootOutcome find_root(G&& g, double lo, double g_lo, double hi, double tol, double cap, int k) {
  std::map<double, double> seen{{lo, g_lo}};
  auto eval = [&](double lam) {
    const double v = g(lam);
    auto it = seen.lower_bound(lam);
    const double slack = 1e-7;
    if (it != seen.end() && it->second < v - slack)
      throw Error(ErrorCode::NoConvergence, k, "terminal phase not monotone in lambda");
    if (it != seen.begin() && std::prev(it)->second > v + slack)
      throw Error(ErrorCode::NoConvergence, k, "terminal phase not monotone in lambda");
    seen[lam] = v;
    return v;
  };
  if (hi > cap) hi = cap;
  double g_hi = eval(hi);
  while (g_hi < 0.0) {
    if (hi >= cap)
      throw Error(ErrorCode::NoConvergence, k, "no bracket below lambda_cap = " + std::to_string(cap));
    lo = hi;
    g_lo = g_hi;
    hi = std::min(cap, hi + 2.0 * std::max(1.0, std::abs(hi)));
    g_hi = eval(hi);
  }
  if (g_hi == 0.0) return {hi, 0.0};
  auto done = [tol](double a, double b) { return std::abs(b - a) <= tol * std::max(1.0, std::min(std::abs(a), std::abs(b))); };
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(eval, lo, hi, g_lo, g_hi, done, iters);
  if (iters >= 200 && !done(a, b))
    throw Error(ErrorCode::NoConvergence, k, "root refinement stalled");
  return {0.5 * (a + b), b - a};
}

int rotation_count(double theta_end, double pi_p) {
  return static_cast<int>(std::floor(theta_end / pi_p - 1e-9)) + 1;
}

void check_common(const ProblemInstance& prob, int k_max, const Solve1dOptions& opts) {
  if (prob.dimension() != 1) throw Error(ErrorCode::InvalidArgument, "the shooting solver needs N = 1");
  if (k_max < 1) throw Error(ErrorCode::InvalidArgument, "k_max must be >= 1");
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (!(opts.lambda_cap > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda_cap must be positive");
}

Spectrum to_spectrum(const ProblemInstance& prob, const std::vector<ShootingResult>& rs,
                     const Solve1dOptions& opts, const char* solver) {
  Spectrum sp;
  sp.solver = solver;
  sp.tol = opts.tol;
  sp.bc = prob.bc();
  sp.epsilon = prob.epsilon();
  for (const auto& r : rs) {
    sp.values.push_back(r.eigenvalue);
    sp.errors.push_back(r.bracket_width);
    sp.residuals.push_back(std::abs(r.radial_residual));
    sp.flags.emplace_back();
  }
  return sp;
}

}  // namespace

std::vector<ShootingResult> shoot_1d(const ProblemInstance& prob, int k_max, const Solve1dOptions& opts) {
  check_common(prob, k_max, opts);
  if (prob.bc().kind == BcKind::NonFlux) return shoot_1d_nonflux(prob, k_max, opts);
  const BcKind kind = prob.bc().kind;
  if (kind != BcKind::Dirichlet && kind != BcKind::Neumann && kind != BcKind::Robin)
    throw Error(ErrorCode::InvalidArgument, std::string("no 1D shooting for ") + to_string(kind));

  auto shared = std::make_shared<const ProblemInstance>(prob);
  const PhaseModel model(prob, ode_tolerance(opts.tol));
  const double pp = model.trig().pi_p();
  const double q = 0.5 * pp;

  std::vector<ShootingResult> out;
  double prev = spectrum_floor(model) - 1.0 - 1e-3 * std::abs(spectrum_floor(model));
  for (int k = 1; k <= k_max; ++k) {
    const double s = pruefer_scale(model, k);
    double theta0 = 0.0, target = k * pp;
    if (kind == BcKind::Neumann) {
      theta0 = q;
      target = q + (k - 1) * pp;
    } else if (kind == BcKind::Robin) {
      // cot_p(theta0) = s beta^{1/(p-1)}, i.e. |sin_p|^p = 1 / (1 + c^p).
      const double c = s * std::pow(prob.bc().beta, 1.0 / (model.p() - 1.0));
      theta0 = model.trig().angle_of_sigma(1.0 / (1.0 + std::pow(c, model.p())));
      target = pp - theta0 + (k - 1) * pp;
    }
    auto g = [&](double lam) { return model.theta_end(lam, s, theta0) - target; };
    const double lo = prev;
    const double g_lo = g(lo);
    if (!(g_lo < 0.0))
      throw Error(ErrorCode::NoConvergence, k, "lower bracket is not below the root");
    const double hi = std::max(lo + 1.0, dirichlet_ceiling(model, k) * (1.0 + 1e-6) + 1e-6);
    const RootOutcome root = find_root(g, lo, g_lo, hi, opts.tol, opts.lambda_cap, k);

    ShootingResult r;
    r.index = k;
    r.eigenvalue = root.lambda;
    r.bracket_width = root.width;
    r.theta0 = theta0;
    r.scale = s;
    r.problem = shared;
    std::vector<double> xs, ths;
    r.theta_end = model.theta_end(root.lambda, s, theta0, &xs, &ths);
    r.rotation_count = rotation_count(r.theta_end, pp);
    r.radial_residual = 0.0;
    if (opts.phase_samples > 0) {
      const std::size_t stride = std::max<std::size_t>(1, xs.size() / opts.phase_samples);
      for (std::size_t i = 0; i < xs.size(); i += stride) {
        r.phase_x.push_back(xs[i]);
        r.phase_theta.push_back(ths[i]);
      }
    }
    out.push_back(std::move(r));
    prev = root.lambda;
  }
  return out;
}

Spectrum solve_1d(const ProblemInstance& prob, int k_max, const Solve1dOptions& opts) {
  if (prob.bc().kind == BcKind::NonFlux) return solve_1d_nonflux(prob, k_max, opts);
  const auto rs = shoot_1d(prob, k_max, opts);
  Spectrum sp = to_spectrum(prob, rs, opts, "prufer");
  for (std::size_t i = 0; i < rs.size(); ++i)
    sp.residuals[i] = rs[i].bracket_width / std::max(1.0, std::abs(rs[i].eigenvalue));
  return sp;
}

std::vector<ShootingResult> shoot_1d_nonflux(const ProblemInstance& prob, int k_max,
                                             const Solve1dOptions& opts) {
  check_common(prob, k_max, opts);
  if (prob.bc().kind != BcKind::NonFlux)
    throw Error(ErrorCode::InvalidArgument, "shoot_1d_nonflux needs a NonFlux problem");
  auto shared = std::make_shared<const ProblemInstance>(prob);
  const PhaseModel model(prob, ode_tolerance(opts.tol));
  const double pp = model.trig().pi_p();
  constexpr int kSamples = 24;

  // Extreme of f(theta0) = theta(L) - theta0 over one period (sign = +1 for
  // the maximum, -1 for the minimum).
  struct Extreme {
    double value;
    double theta0;
  };
  auto extreme = [&](double lam, double s, int sign) {
    auto f = [&](double t0) { return model.theta_end(lam, s, t0) - t0; };
    int best = 0;
    double best_v = -INFINITY;
    std::array<double, kSamples> vals{};
    for (int i = 0; i < kSamples; ++i) {
      vals[i] = sign * f(i * pp / kSamples);
      if (vals[i] > best_v) {
        best_v = vals[i];
        best = i;
      }
    }
    const double a = (best - 1) * pp / kSamples, b = (best + 1) * pp / kSamples;
    std::uintmax_t it = 60;
    const auto [t, v] = boost::math::tools::brent_find_minima([&](double t0) { return -sign * f(t0); }, a, b,
                                                              std::numeric_limits<double>::digits / 2 + 8, it);
    const double refined = -v;
    if (refined >= best_v) return Extreme{sign * refined, t};
    return Extreme{sign * best_v, best * pp / kSamples};
  };

  std::vector<ShootingResult> out;
  const double floor = spectrum_floor(model) - 1.0 - 1e-3 * std::abs(spectrum_floor(model));
  double prev = floor;
  for (int k = 1; k <= k_max; ++k) {
    const int j = k / 2;
    const int sign = (k % 2 == 0) ? +1 : -1;  // max for even k, min for odd k
    const double target = 2.0 * j * pp;
    const double s = pruefer_scale(model, std::max(1, 2 * j));
    auto g = [&](double lam) { return extreme(lam, s, sign).value - target; };

    double lo = k == 1 ? floor : prev;
    double g_lo = g(lo);
    double step = opts.tol * std::max(1.0, std::abs(prev));
    while (!(g_lo < 0.0)) {
      if (lo <= floor)
        throw Error(ErrorCode::NoConvergence, k, "lower bracket is not below the root");
      step *= 4.0;
      lo = std::max(floor, prev - step);
      g_lo = g(lo);
    }
    const double hi = std::max(lo + 1.0, dirichlet_ceiling(model, k) * (1.0 + 1e-6) + 1e-6);
    const RootOutcome root = find_root(g, lo, g_lo, hi, opts.tol, opts.lambda_cap, k);

    const Extreme e = extreme(root.lambda, s, sign);
    ShootingResult r;
    r.index = k;
    r.eigenvalue = root.lambda;
    r.bracket_width = root.width;
    r.theta0 = e.theta0;
    r.scale = s;
    r.problem = shared;
    const auto traj = model.trajectory(root.lambda, s, e.theta0, {model.length()});
    r.theta_end = traj.back()[0];
    r.radial_residual = traj.back()[1];
    r.rotation_count = 2 * j;
    out.push_back(std::move(r));
    prev = root.lambda;
  }
  return out;
}

Spectrum solve_1d_nonflux(const ProblemInstance& prob, int k_max, const Solve1dOptions& opts) {
  const auto rs = shoot_1d_nonflux(prob, k_max, opts);
  Spectrum sp = to_spectrum(prob, rs, opts, "prufer-periodic");
  const bool p2 = prob.op().p() == 2.0;
  for (int k = 1; k < sp.size(); ++k) {
    const double a = sp.values[k - 1], b = sp.values[k];
    if (k % 2 == 0 && std::abs(b - a) <= 10.0 * opts.tol * std::max(1.0, std::abs(b))) {
      sp.add_flag(k - 1, kFlagMultiple);
      sp.add_flag(k, kFlagMultiple);
    }
  }
  if (!p2)
    for (int k = 1; k < sp.size(); ++k) sp.add_flag(k, kFlagUncertain);
  return sp;
}

DiscreteFunction eigenfunction_1d(const ShootingResult& result, int n_points) {
  if (n_points < 2) throw Error(ErrorCode::InvalidArgument, "n_points must be >= 2");
  if (!result.problem) throw Error(ErrorCode::InvalidArgument, "shooting result carries no problem");
  const ProblemInstance& prob = *result.problem;
  const PhaseModel model(prob, 1e-12);
  auto mesh = std::make_shared<const Mesh1>(Mesh1::uniform(model.length(), n_points - 1));
  const auto traj = model.trajectory(result.eigenvalue, result.scale, result.theta0, mesh->nodes());
  std::vector<double> u(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) u[i] = std::exp(traj[i][1]) * model.trig().sin(traj[i][0]);
  double sign = model.trig().cos(result.theta0) >= 0.0 ? 1.0 : -1.0;
  // The periodic ground state has no sign change, so make it positive.
  const bool positive = prob.bc().kind == BcKind::NonFlux && result.index == 1;
  if (positive || std::abs(model.trig().cos(result.theta0)) < 1e-12)
    sign = model.trig().sin(result.theta0) >= 0.0 ? 1.0 : -1.0;
  const double norm = traj.back()[2];
  DiscreteFunction f(mesh, std::move(u));
  return f.scaled(sign / std::pow(norm, 1.0 / model.p()));
}

}  // namespace homogeig
