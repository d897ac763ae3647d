#include "homogeig/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "homogeig/fem2d.hpp"
#include "homogeig/fit.hpp"
#include "homogeig/parallel.hpp"
#include "homogeig/quadrature.hpp"
#include "homogeig/solver1d.hpp"

namespace homogeig {
namespace {

using std::numbers::pi;

constexpr int kBumpCells1d = 2048;
constexpr int kBumpCells2d = 64;
constexpr int kModeCells2d = 32;

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

 private:
  std::mt19937_64 rng_;
};

bool zero_trace(const OscillationProbe& probe) { return probe.space == TraceSpace::ZeroTrace; }

DiscreteFunction bump(const OscillationProbe& probe, Draw& d) {
  const Domain& dom = probe.domain;
  const double lx = dom.lx(), ly = dom.ly();
  if (zero_trace(probe)) {
    const double qx = d.uniform(1.0, 3.0), qy = d.uniform(1.0, 3.0);
    const double b = d.uniform(0.0, 0.5), phase = d.uniform(0.0, 2.0 * pi);
    const int fx = d.integer(1, 4), fy = d.integer(0, 3);
    if (dom.dimension() == 1) {
      auto mesh = std::make_shared<const Mesh1>(Mesh1::uniform(lx, kBumpCells1d));
      return interpolate(mesh, [=](double x) {
        return std::pow(std::sin(pi * x / lx), qx) * (1.0 + b * std::sin(2.0 * pi * fx * x / lx + phase));
      });
    }
    auto mesh = std::make_shared<const Mesh2>(Mesh2::criss_cross(lx, ly, kBumpCells2d, kBumpCells2d));
    return interpolate(mesh, [=](Point x) {
      return std::pow(std::sin(pi * x.x / lx), qx) * std::pow(std::sin(pi * x.y / ly), qy) *
             (1.0 + b * std::sin(2.0 * pi * (fx * x.x / lx + fy * x.y / ly) + phase));
    });
  }
  const double c0 = d.uniform(0.5, 1.5), c1 = d.uniform(-1.0, 1.0), c2 = d.uniform(-1.0, 1.0);
  const double amp = d.uniform(-1.0, 1.0), w = d.uniform(0.1, 0.4);
  const Point center{d.uniform(0.0, lx), d.uniform(0.0, ly)};
  if (dom.dimension() == 1) {
    auto mesh = std::make_shared<const Mesh1>(Mesh1::uniform(lx, kBumpCells1d));
    return interpolate(mesh, [=](double x) {
      const double r = (x - center.x) / (w * lx);
      return c0 + c1 * x / lx + amp * std::exp(-r * r);
    });
  }
  auto mesh = std::make_shared<const Mesh2>(Mesh2::criss_cross(lx, ly, kBumpCells2d, kBumpCells2d));
  return interpolate(mesh, [=](Point x) {
    const double rx = (x.x - center.x) / (w * lx), ry = (x.y - center.y) / (w * ly);
    return c0 + c1 * x.x / lx + c2 * x.y / ly + amp * std::exp(-rx * rx - ry * ry);
  });
}

DiscreteFunction random_linear(const OscillationProbe& probe, Draw& d) {
  const Domain& dom = probe.domain;
  if (dom.dimension() == 1) {
    const int cells = d.integer(3, 12);
    std::vector<double> nodes{0.0, dom.lx()};
    for (int i = 1; i < cells; ++i) nodes.push_back(d.uniform(0.0, dom.lx()));
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::vector<double> v;
    for (std::size_t i = 0; i < nodes.size(); ++i) v.push_back(d.uniform(-1.0, 1.0));
    if (zero_trace(probe)) v.front() = v.back() = 0.0;
    return DiscreteFunction(std::make_shared<const Mesh1>(Mesh1::from_nodes(std::move(nodes))), std::move(v));
  }
  const int n = d.integer(2, 6);
  auto mesh = std::make_shared<const Mesh2>(Mesh2::criss_cross(dom.lx(), dom.ly(), n, n));
  std::vector<double> v;
  for (int i = 0; i < mesh->vertex_count(); ++i) {
    const double value = d.uniform(-1.0, 1.0);
    v.push_back(zero_trace(probe) && mesh->on_boundary()[i] ? 0.0 : value);
  }
  return DiscreteFunction(mesh, std::move(v));
}

std::vector<DiscreteFunction> modes(const OscillationProbe& probe, int count) {
  std::vector<DiscreteFunction> out;
  if (count <= 0) return out;
  const auto one = CoefficientField::constant(1.0);
  const BoundaryCondition bc = zero_trace(probe) ? BoundaryCondition::dirichlet() : BoundaryCondition::neumann();
  if (probe.domain.dimension() == 1) {
    const ProblemInstance prob(probe.domain, OperatorSpec::p_laplacian(probe.p), one, one, bc, kAveraged);
    Solve1dOptions o;
    o.tol = 1e-10;
    for (const auto& r : shoot_1d(prob, count, o)) {
      out.push_back(eigenfunction_1d(r, 16 * count + 1));
      // The shooting end value is zero only to the solver tolerance.
      if (zero_trace(probe)) out.back().values().front() = out.back().values().back() = 0.0;
    }
    return out;
  }
  const ProblemInstance prob(probe.domain, OperatorSpec::p_laplacian(2.0), one, one, bc, kAveraged);
  auto mesh = std::make_shared<const Mesh2>(
      Mesh2::criss_cross(probe.domain.lx(), probe.domain.ly(), kModeCells2d, kModeCells2d));
  return solve_gevp_modes(assemble(prob, mesh), bc, count).modes;
}

// Integral of p |u|^{p-1} |grad u|, the gradient part of the W^{1,1} norm
// of |u|^p. In 1D it is the total variation of |u|^p, known per cell.
double power_variation(const DiscreteFunction& u, double p) {
  const auto& val = u.values();
  double total = 0.0;
  if (u.mesh1()) {
    for (std::size_t i = 0; i + 1 < val.size(); ++i) {
      const double a = std::pow(std::abs(val[i]), p), b = std::pow(std::abs(val[i + 1]), p);
      total += val[i] * val[i + 1] < 0.0 ? a + b : std::abs(b - a);
    }
    return total;
  }
  const Mesh2& m = *u.mesh2();
  Resolution res;
  res.add_cut_size(0.25 * std::min(m.hx(), m.hy()));
  for (const auto& t : m.triangles()) {
    const Point a = m.vertices()[t[0]], b = m.vertices()[t[1]], c = m.vertices()[t[2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    const double du1 = val[t[1]] - val[t[0]], du2 = val[t[2]] - val[t[0]];
    const Vec2 g{(du1 * (c.y - a.y) - du2 * (b.y - a.y)) / det, (du2 * (b.x - a.x) - du1 * (c.x - a.x)) / det};
    const double gn = norm(g);
    if (gn == 0.0) continue;
    quadrature_triangle(a, b, c, res, [&](Point x, double w) {
      const double ux = val[t[0]] + g.x * (x.x - a.x) + g.y * (x.y - a.y);
      total += w * p * std::pow(std::abs(ux), p - 1.0) * gn;
    });
  }
  return total;
}

void check_probe(const OscillationProbe& probe) {
  if (!(probe.p > 1.0)) throw Error(ErrorCode::InvalidArgument, "probe exponent must exceed 1");
  if (probe.family_size < 1) throw Error(ErrorCode::InvalidArgument, "family_size must be >= 1");
}

}  // namespace

const char* to_string(TraceSpace space) { return space == TraceSpace::ZeroTrace ? "zero-trace" : "free-trace"; }

const char* to_string(TestFamily family) {
  switch (family) {
    case TestFamily::Bumps: return "bumps";
    case TestFamily::Eigenfunctions: return "eigenfunctions";
    case TestFamily::RandomPiecewiseLinear: return "random-pl";
    case TestFamily::Mixed: return "mixed";
  }
  return "unknown";
}

TraceSpace parse_trace_space(const std::string& name) {
  if (name == "zero-trace") return TraceSpace::ZeroTrace;
  if (name == "free-trace") return TraceSpace::FreeTrace;
  throw Error(ErrorCode::InvalidArgument, "unknown trace space '" + name + "'");
}

TestFamily parse_test_family(const std::string& name) {
  for (auto f : {TestFamily::Bumps, TestFamily::Eigenfunctions, TestFamily::RandomPiecewiseLinear,
                 TestFamily::Mixed})
    if (name == to_string(f)) return f;
  throw Error(ErrorCode::InvalidArgument, "unknown test family '" + name + "'");
}

std::vector<DiscreteFunction> test_family(const OscillationProbe& probe) {
  check_probe(probe);
  const int n = probe.family_size;
  Draw d(probe.seed);
  std::vector<DiscreteFunction> out;
  switch (probe.family) {
    case TestFamily::Bumps:
      for (int i = 0; i < n; ++i) out.push_back(bump(probe, d));
      break;
    case TestFamily::Eigenfunctions:
      out = modes(probe, n);
      break;
    case TestFamily::RandomPiecewiseLinear:
      for (int i = 0; i < n; ++i) out.push_back(random_linear(probe, d));
      break;
    case TestFamily::Mixed: {
      auto eig = modes(probe, n / 3);
      std::size_t next_mode = 0;
      for (int i = 0; i < n; ++i) {
        if (i % 3 == 0) out.push_back(bump(probe, d));
        else if (i % 3 == 1 && next_mode < eig.size()) out.push_back(eig[next_mode++]);
        else out.push_back(random_linear(probe, d));
      }
      break;
    }
  }
  return out;
}

double oscillation_gap(const OscillationProbe& probe, const DiscreteFunction& u, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  const CoefficientField centered =
      linear_combination(1.0, probe.g, -1.0, CoefficientField::constant(probe.g.average()));
  return std::abs(functional_F(u, ScaledField(centered, eps), probe.p));
}

double oscillation_ratio(const OscillationProbe& probe, const DiscreteFunction& u, double eps) {
  double den = 0.0;
  if (zero_trace(probe)) {
    den = functional_G(u, OperatorSpec::p_laplacian(probe.p));
  } else {
    den = functional_F(u, ScaledField(CoefficientField::constant(1.0), kAveraged), probe.p) +
          power_variation(u, probe.p);
  }
  if (!(den > 0.0)) throw Error(ErrorCode::ZeroDenominator, "normalization of the oscillation ratio vanishes");
  return oscillation_gap(probe, u, eps) / (eps * den);
}

double averaging_constant(const DiscreteFunction& u, const ProblemInstance& prob) {
  if (!prob.epsilon()) throw Error(ErrorCode::InvalidArgument, "averaging constant needs a finite scale");
  const double p = prob.op().p();
  const double eps = *prob.epsilon();
  const ProblemInstance avg = prob.at_scale(kAveraged);
  const double f_bar = functional_F(u, avg.rho(), p);
  const double f_eps = functional_F(u, prob.rho(), p);
  const double energy = functional_F(u, avg.potential(), p) + functional_G(u, prob.op());
  if (!(energy > 0.0) || !(f_eps > 0.0))
    throw Error(ErrorCode::ZeroDenominator, "F(u, mean V) + G(u) and F(u, rho_eps) must be positive");
  return (f_bar / f_eps - 1.0) * f_bar / (eps * energy);
}

OscillationFit oscillation_gaps(const OscillationProbe& probe, const std::vector<double>& eps_list, int jobs) {
  if (eps_list.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 eps values");
  std::vector<double> eps = eps_list;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  for (double e : eps)
    if (!(e > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps values must be positive");
  const double q = eps[1] / eps[0];
  for (std::size_t i = 1; i < eps.size(); ++i)
    if (!(q < 1.0) || std::abs(eps[i] / eps[i - 1] - q) > 1e-9 * q)
      throw Error(ErrorCode::InvalidArgument, "eps values must form a geometric sequence");

  const auto family = test_family(probe);
  const int nf = static_cast<int>(family.size()), ne = static_cast<int>(eps.size());
  std::vector<double> gaps(static_cast<std::size_t>(nf) * ne), ratios(gaps.size(), -1.0);
  parallel_for(nf * ne, jobs, [&](int idx) {
    const auto& u = family[static_cast<std::size_t>(idx / ne)];
    const double e = eps[static_cast<std::size_t>(idx % ne)];
    gaps[idx] = oscillation_gap(probe, u, e);
    try {
      ratios[idx] = oscillation_ratio(probe, u, e);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::ZeroDenominator) throw;
    }
  });

  OscillationFit fit;
  fit.eps = eps;
  fit.max_gap.assign(eps.size(), 0.0);
  fit.max_ratio.assign(eps.size(), 0.0);
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < ne; ++j) {
      fit.max_gap[j] = std::max(fit.max_gap[j], gaps[static_cast<std::size_t>(i) * ne + j]);
      fit.max_ratio[j] = std::max(fit.max_ratio[j], ratios[static_cast<std::size_t>(i) * ne + j]);
    }
  return fit;
}

OscillationFit fit_oscillation_rate(const OscillationProbe& probe, const std::vector<double>& eps_list, int jobs) {
  if (eps_list.size() < 4) throw Error(ErrorCode::InvalidArgument, "rate fit needs at least 4 eps values");
  OscillationFit fit = oscillation_gaps(probe, eps_list, jobs);
  const auto& eps = fit.eps;
  const int ne = static_cast<int>(eps.size());
  if (std::all_of(fit.max_gap.begin(), fit.max_gap.end(), [](double g) { return g < 1e-13; }))
    throw Error(ErrorCode::DegenerateFit, "all oscillation gaps are below 1e-13");
  std::vector<double> xs, ys;
  for (int j = 0; j < ne; ++j)
    if (fit.max_gap[j] > 0.0) {
      xs.push_back(eps[j]);
      ys.push_back(fit.max_gap[j]);
    }
  if (xs.size() < 2) throw Error(ErrorCode::DegenerateFit, "fewer than two nonzero gaps");
  const LogLogFit f = fit_loglog(xs, ys);
  fit.slope = f.slope;
  fit.intercept = f.intercept;
  fit.r2 = f.r2;
  fit.constant = f.constant();
  return fit;
}

}  // namespace homogeig
