#include "homogeig/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include "homogeig/fem2d.hpp"
#include "homogeig/fit.hpp"
#include "homogeig/parallel.hpp"
#include "homogeig/solver1d.hpp"

namespace homogeig {
namespace {

using json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool same_scale(const Scale& a, const Scale& b) { return a.has_value() == b.has_value() && (!a || *a == *b); }

// Exponent q of the bound |lambda_k^eps - lambda_k| <= C k^q eps.
double c_reference(const BoundaryCondition& bc, double p, int n) {
  return bc.kind == BcKind::Steklov ? (p - 1.0) / (n - 1.0) : 2.0 * p / n;
}

// Exponent of the Weyl-type bound lambda_k <= C k^q.
double lambda_reference(const BoundaryCondition& bc, double p, int n) {
  return bc.kind == BcKind::Steklov ? (p - 1.0) / (n - 1.0) : p / n;
}

void check_geometric(std::vector<double>& eps) {
  std::sort(eps.begin(), eps.end(), std::greater<>());
  for (double e : eps)
    if (!(e > 0.0) || !std::isfinite(e)) throw Error(ErrorCode::InvalidArgument, "eps values must be positive");
  if (std::adjacent_find(eps.begin(), eps.end()) != eps.end())
    throw Error(ErrorCode::InvalidArgument, "eps values must be distinct");
  if (eps.size() < 3) return;
  const double q = eps[1] / eps[0];
  for (std::size_t i = 2; i < eps.size(); ++i)
    if (std::abs(eps[i] / eps[i - 1] - q) > 1e-9 * q)
      throw Error(ErrorCode::InvalidArgument, "eps values must form a geometric sequence");
}

json bc_json(const BoundaryCondition& bc) {
  json j;
  j["kind"] = to_string(bc.kind);
  if (bc.kind == BcKind::Robin) j["beta"] = bc.beta;
  return j;
}

BoundaryCondition bc_from_json(const json& j) {
  return parse_bc(j.at("kind").get<std::string>(), j.value("beta", 0.0));
}

json scale_json(const Scale& eps) { return eps ? json(*eps) : json("averaged"); }

Scale scale_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "averaged") throw Error(ErrorCode::InvalidArgument, "bad scale value");
    return kAveraged;
  }
  return j.get<double>();
}

json growth_json(const GrowthFit& g) {
  json j;
  j["status"] = g.status;
  j["ks"] = g.ks;
  j["values"] = g.values;
  j["exponent"] = g.exponent;
  j["intercept"] = g.intercept;
  j["r2"] = g.r2;
  j["reference"] = g.reference;
  j["upper"] = g.upper;
  j["lower"] = g.lower ? json(*g.lower) : json(nullptr);
  j["pass"] = g.pass;
  return j;
}

GrowthFit growth_from_json(const json& j) {
  GrowthFit g;
  g.status = j.at("status").get<std::string>();
  g.ks = j.at("ks").get<std::vector<int>>();
  g.values = j.at("values").get<std::vector<double>>();
  g.exponent = j.at("exponent").get<double>();
  g.intercept = j.at("intercept").get<double>();
  g.r2 = j.at("r2").get<double>();
  g.reference = j.at("reference").get<double>();
  g.upper = j.at("upper").get<double>();
  if (!j.at("lower").is_null()) g.lower = j.at("lower").get<double>();
  g.pass = j.at("pass").get<bool>();
  return g;
}

}  // namespace

Spectrum solve_spectrum(const ProblemInstance& prob, int k_max, const SolverSettings& s) {
  if (prob.dimension() == 1) {
    Solve1dOptions o;
    o.tol = s.tol;
    o.lambda_cap = s.lambda_cap;
    return solve_1d(prob, k_max, o);
  }
  FemOptions o;
  o.tol = s.tol;
  o.dense_limit = s.dense_limit;
  o.min_cells = s.min_cells;
  o.richardson_levels = s.richardson_levels;
  return s.richardson ? reference_spectrum(prob, k_max, o) : solve_fem(prob, k_max, o);
}

const SweepRow* SweepTable::find(const BoundaryCondition& bc, int k, const Scale& eps) const {
  for (const auto& r : rows)
    if (r.bc == bc && r.k == k && same_scale(r.eps, eps)) return &r;
  return nullptr;
}

std::vector<BoundaryCondition> SweepTable::conditions() const {
  std::vector<BoundaryCondition> out;
  for (const auto& r : rows)
    if (std::find(out.begin(), out.end(), r.bc) == out.end()) out.push_back(r.bc);
  return out;
}

std::vector<int> SweepTable::ks(const BoundaryCondition& bc) const {
  std::set<int> s;
  for (const auto& r : rows)
    if (r.bc == bc) s.insert(r.k);
  return {s.begin(), s.end()};
}

std::vector<double> SweepTable::scales(const BoundaryCondition& bc) const {
  std::set<double, std::greater<>> s;
  for (const auto& r : rows)
    if (r.bc == bc && r.eps) s.insert(*r.eps);
  return {s.begin(), s.end()};
}

SweepTable sweep(const SweepSpec& spec, int jobs) {
  if (spec.bcs.empty()) throw Error(ErrorCode::InvalidArgument, "sweep needs at least one condition");
  if (spec.ks.empty()) throw Error(ErrorCode::InvalidArgument, "sweep needs at least one k");
  std::vector<int> ks = spec.ks;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  if (ks.front() < 1) throw Error(ErrorCode::InvalidArgument, "k values must be >= 1");
  std::vector<double> eps = spec.eps;
  check_geometric(eps);

  std::vector<Scale> scales{kAveraged};
  for (double e : eps) scales.emplace_back(e);
  const int ns = static_cast<int>(scales.size());
  const int ncells = static_cast<int>(spec.bcs.size()) * ns;
  std::vector<Spectrum> spectra(static_cast<std::size_t>(ncells));
  std::vector<double> wall(spectra.size(), 0.0);
  std::vector<std::optional<Error>> failed(spectra.size());

  parallel_for(ncells, jobs, [&](int c) {
    const BoundaryCondition& bc = spec.bcs[static_cast<std::size_t>(c / ns)];
    const Scale& e = scales[static_cast<std::size_t>(c % ns)];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      spectra[c] = solve_spectrum(spec.base.with_bc(bc).at_scale(e), ks.back(), spec.solver);
    } catch (const Error& err) {
      failed[c] = Error(err.code(), err.index(),
                        "cell (bc=" + bc.label() + ", eps=" + scale_label(e) + "): " + err.what());
    }
    wall[c] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });

  // Every failing cell goes into one message; code and index come from the first.
  const Error* first = nullptr;
  std::string summary;
  for (const auto& f : failed) {
    if (!f) continue;
    if (!first) first = &*f;
    summary += (summary.empty() ? "" : "; ") + f->detail();
  }
  if (first) throw Error(first->code(), first->index(), summary);

  SweepTable t;
  t.family_id = spec.family_id;
  t.dimension = spec.base.dimension();
  t.p = spec.base.op().p();
  t.tol = spec.solver.tol;
  for (int c = 0; c < ncells; ++c) {
    const Spectrum& s = spectra[c];
    for (int k : ks) {
      SweepRow r;
      r.bc = spec.bcs[static_cast<std::size_t>(c / ns)];
      r.k = k;
      r.eps = scales[static_cast<std::size_t>(c % ns)];
      r.lambda = s.values[k - 1];
      r.error = s.errors.empty() ? 0.0 : s.errors[k - 1];
      r.residual = s.residuals.empty() ? 0.0 : s.residuals[k - 1];
      r.flags = s.flags.empty() ? "" : s.flags[k - 1];
      r.solver = s.solver;
      r.tol = s.tol;
      r.wall_ms = spec.timing ? wall[c] : 0.0;
      t.rows.push_back(std::move(r));
    }
  }
  return t;
}

GrowthFit growth_exponent(const std::vector<int>& ks, const std::vector<double>& values, double reference,
                          double upper, std::optional<double> lower) {
  if (ks.size() != values.size() || ks.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "growth fit needs at least two (k, value) pairs");
  std::vector<double> x(ks.begin(), ks.end());
  const LogLogFit f = fit_loglog(x, values);
  GrowthFit g;
  g.ks = ks;
  g.values = values;
  g.exponent = f.slope;
  g.intercept = f.intercept;
  g.r2 = f.r2;
  g.reference = reference;
  g.upper = upper;
  g.lower = lower;
  g.pass = f.slope <= upper && (!lower || f.slope >= *lower);
  return g;
}

RateReport fit_rate(const SweepTable& table, const RateThresholds& th) {
  RateReport rep;
  rep.family_id = table.family_id;
  rep.config_hash = table.config_hash;
  rep.dimension = table.dimension;
  rep.p = table.p;
  rep.thresholds = th;
  const int n = table.dimension;
  for (const auto& bc : table.conditions()) {
    BcRates br;
    br.bc = bc;
    const auto eps = table.scales(bc);
    if (eps.size() < 4) throw Error(ErrorCode::InvalidArgument, "rate fit needs >= 4 eps values for " + bc.label());
    {
      std::vector<double> check = eps;
      check_geometric(check);
    }
    const double q = c_reference(bc, table.p, n);
    br.theorem_constant.assign(eps.size(), 0.0);
    std::vector<int> ok_ks;
    std::vector<double> ok_c;
    std::vector<double> lambdas;
    std::vector<int> lambda_ks;
    for (int k : table.ks(bc)) {
      const SweepRow* avg = table.find(bc, k, kAveraged);
      if (!avg) throw Error(ErrorCode::InvalidArgument, "missing averaged row for " + bc.label() + " k=" + std::to_string(k));
      lambda_ks.push_back(k);
      lambdas.push_back(avg->lambda);
      RateCell cell;
      cell.k = k;
      bool all_floor = true;
      for (std::size_t i = 0; i < eps.size(); ++i) {
        const SweepRow* r = table.find(bc, k, eps[i]);
        if (!r)
          throw Error(ErrorCode::InvalidArgument,
                      "missing row for " + bc.label() + " k=" + std::to_string(k) + " eps=" + fmt(eps[i]));
        const double d = std::abs(r->lambda - avg->lambda);
        const double est = r->error + avg->error;
        const double floor = 10.0 * table.tol * std::max(1.0, std::abs(avg->lambda)) + est;
        all_floor = all_floor && d <= floor;
        cell.eps.push_back(eps[i]);
        cell.errors.push_back(d);
        cell.estimates.push_back(est);
        br.theorem_constant[i] = std::max(br.theorem_constant[i], d / (std::pow(k, q) * eps[i]));
      }
      const double dmin = *std::min_element(cell.errors.begin(), cell.errors.end());
      std::vector<double> xs, ys;
      for (std::size_t i = 0; i < eps.size(); ++i) {
        const bool bad = cell.estimates[i] > th.resolution_fraction * dmin || !(cell.errors[i] > 0.0);
        cell.unresolved.push_back(bad);
        if (!bad) {
          xs.push_back(cell.eps[i]);
          ys.push_back(cell.errors[i]);
        }
      }
      if (all_floor) {
        cell.status = kStatusDegenerate;
      } else if (xs.size() < 4) {
        cell.status = kStatusUnresolved;
      } else {
        const LogLogFit f = fit_loglog(xs, ys);
        cell.slope = f.slope;
        cell.constant = f.constant();
        cell.r2 = f.r2;
        cell.points = f.points;
        if (f.r2 >= th.min_r2) cell.pass = f.slope >= th.min_slope;
        ok_ks.push_back(k);
        ok_c.push_back(cell.constant);
      }
      br.cells.push_back(std::move(cell));
    }
    if (ok_ks.size() >= 2) {
      br.c_growth = growth_exponent(ok_ks, ok_c, q, q + th.c_growth_slack);
    } else {
      br.c_growth.status = kStatusInsufficient;
      br.c_growth.ks = ok_ks;
      br.c_growth.values = ok_c;
      br.c_growth.reference = q;
      br.c_growth.upper = q + th.c_growth_slack;
    }
    const double lq = lambda_reference(bc, table.p, n);
    const bool positive = std::all_of(lambdas.begin(), lambdas.end(), [](double v) { return v > 0.0; });
    const double upper = bc.kind == BcKind::Steklov ? lq * (1.0 + th.steklov_growth_rel) : lq * (1.0 + th.lambda_growth_rel);
    const std::optional<double> lower =
        bc.kind == BcKind::Steklov ? std::nullopt : std::optional<double>(lq * (1.0 - th.lambda_growth_rel));
    if (lambdas.size() >= 2 && positive) {
      br.lambda_growth = growth_exponent(lambda_ks, lambdas, lq, upper, lower);
    } else {
      br.lambda_growth.status = kStatusInsufficient;
      br.lambda_growth.ks = lambda_ks;
      br.lambda_growth.values = lambdas;
      br.lambda_growth.reference = lq;
      br.lambda_growth.upper = upper;
      br.lambda_growth.lower = lower;
    }
    br.theorem_constant_bounded = br.theorem_constant.back() <= br.theorem_constant.front() * (1.0 + 1e-9);
    rep.bcs.push_back(std::move(br));
  }
  return rep;
}

std::vector<OrderingCheck> audit_ordering(const SweepTable& table) {
  std::vector<OrderingCheck> out;
  const auto bcs = table.conditions();
  auto of_kind = [&](BcKind kind) {
    std::vector<BoundaryCondition> v;
    for (const auto& bc : bcs)
      if (bc.kind == kind) v.push_back(bc);
    return v;
  };
  const auto B = of_kind(BcKind::DependentBC), N = of_kind(BcKind::Neumann), P = of_kind(BcKind::NonFlux),
             R = of_kind(BcKind::Robin), D = of_kind(BcKind::Dirichlet), S = of_kind(BcKind::Steklov);
  std::vector<std::pair<BoundaryCondition, BoundaryCondition>> pairs;
  auto add = [&](const std::vector<BoundaryCondition>& lo, const std::vector<BoundaryCondition>& hi) {
    for (const auto& a : lo)
      for (const auto& b : hi) pairs.emplace_back(a, b);
  };
  add(B, N);
  add(N, P);
  add(N, R);
  add(P, D);
  add(R, D);
  add(B, S);

  std::vector<Scale> scales;
  std::set<int> ks;
  for (const auto& r : table.rows) {
    ks.insert(r.k);
    if (std::none_of(scales.begin(), scales.end(), [&](const Scale& s) { return same_scale(s, r.eps); }))
      scales.push_back(r.eps);
  }
  for (const auto& e : scales)
    for (int k : ks)
      for (const auto& [a, b] : pairs) {
        const SweepRow* ra = table.find(a, k, e);
        const SweepRow* rb = table.find(b, k, e);
        if (!ra || !rb) continue;
        OrderingCheck c;
        c.k = k;
        c.eps = e;
        c.relation = a.label() + "<=" + b.label();
        c.lhs = ra->lambda;
        c.rhs = rb->lambda;
        c.pass = c.lhs <= c.rhs + 1e-8 * std::max(1.0, std::abs(c.rhs));
        out.push_back(std::move(c));
      }
  return out;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table, const std::string& experiment) {
  out << "experiment,bc,k,epsilon,lambda,tol,solver,wall_ms\n";
  for (const auto& r : table.rows) {
    std::string bc = r.bc.label();
    if (bc.find(',') != std::string::npos) bc = "\"" + bc + "\"";
    out << experiment << ',' << bc << ',' << r.k << ',' << (r.eps ? fmt(*r.eps) : "averaged") << ','
        << fmt(r.lambda) << ',' << fmt(r.tol) << ',' << r.solver << ',' << fmt(r.wall_ms) << '\n';
  }
}

json to_json(const SweepTable& t) {
  json j;
  j["family_id"] = t.family_id;
  j["config_hash"] = t.config_hash;
  j["dimension"] = t.dimension;
  j["p"] = t.p;
  j["tol"] = t.tol;
  json rows = json::array();
  for (const auto& r : t.rows) {
    json jr;
    jr["bc"] = bc_json(r.bc);
    jr["k"] = r.k;
    jr["epsilon"] = scale_json(r.eps);
    jr["lambda"] = r.lambda;
    jr["error"] = r.error;
    jr["residual"] = r.residual;
    jr["flags"] = r.flags;
    jr["solver"] = r.solver;
    jr["tol"] = r.tol;
    jr["wall_ms"] = r.wall_ms;
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  return j;
}

SweepTable sweep_from_json(const json& j) {
  try {
    SweepTable t;
    t.family_id = j.at("family_id").get<std::string>();
    t.config_hash = j.at("config_hash").get<std::string>();
    t.dimension = j.at("dimension").get<int>();
    t.p = j.at("p").get<double>();
    t.tol = j.at("tol").get<double>();
    for (const auto& jr : j.at("rows")) {
      SweepRow r;
      r.bc = bc_from_json(jr.at("bc"));
      r.k = jr.at("k").get<int>();
      r.eps = scale_from_json(jr.at("epsilon"));
      r.lambda = jr.at("lambda").get<double>();
      r.error = jr.at("error").get<double>();
      r.residual = jr.at("residual").get<double>();
      r.flags = jr.at("flags").get<std::string>();
      r.solver = jr.at("solver").get<std::string>();
      r.tol = jr.at("tol").get<double>();
      r.wall_ms = jr.at("wall_ms").get<double>();
      t.rows.push_back(std::move(r));
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed sweep table: ") + e.what());
  }
}

json to_json(const RateReport& rep) {
  json j;
  j["family_id"] = rep.family_id;
  j["config_hash"] = rep.config_hash;
  j["dimension"] = rep.dimension;
  j["p"] = rep.p;
  const auto& th = rep.thresholds;
  j["thresholds"] = {{"min_slope", th.min_slope},
                     {"min_r2", th.min_r2},
                     {"c_growth_slack", th.c_growth_slack},
                     {"lambda_growth_rel", th.lambda_growth_rel},
                     {"steklov_growth_rel", th.steklov_growth_rel},
                     {"resolution_fraction", th.resolution_fraction}};
  json bcs = json::array();
  for (const auto& b : rep.bcs) {
    json jb;
    jb["bc"] = bc_json(b.bc);
    json cells = json::array();
    for (const auto& c : b.cells) {
      json jc;
      jc["k"] = c.k;
      jc["status"] = c.status;
      jc["eps"] = c.eps;
      jc["errors"] = c.errors;
      jc["estimates"] = c.estimates;
      jc["unresolved"] = c.unresolved;
      jc["slope"] = c.slope;
      jc["constant"] = c.constant;
      jc["r2"] = c.r2;
      jc["points"] = c.points;
      jc["pass"] = c.pass ? json(*c.pass) : json(nullptr);
      cells.push_back(std::move(jc));
    }
    jb["cells"] = std::move(cells);
    jb["c_growth"] = growth_json(b.c_growth);
    jb["lambda_growth"] = growth_json(b.lambda_growth);
    jb["theorem_constant"] = b.theorem_constant;
    jb["theorem_constant_bounded"] = b.theorem_constant_bounded;
    bcs.push_back(std::move(jb));
  }
  j["bcs"] = std::move(bcs);
  return j;
}

RateReport rate_report_from_json(const json& j) {
  try {
    RateReport rep;
    rep.family_id = j.at("family_id").get<std::string>();
    rep.config_hash = j.at("config_hash").get<std::string>();
    rep.dimension = j.at("dimension").get<int>();
    rep.p = j.at("p").get<double>();
    const auto& th = j.at("thresholds");
    rep.thresholds.min_slope = th.at("min_slope").get<double>();
    rep.thresholds.min_r2 = th.at("min_r2").get<double>();
    rep.thresholds.c_growth_slack = th.at("c_growth_slack").get<double>();
    rep.thresholds.lambda_growth_rel = th.at("lambda_growth_rel").get<double>();
    rep.thresholds.steklov_growth_rel = th.at("steklov_growth_rel").get<double>();
    rep.thresholds.resolution_fraction = th.at("resolution_fraction").get<double>();
    for (const auto& jb : j.at("bcs")) {
      BcRates b;
      b.bc = bc_from_json(jb.at("bc"));
      for (const auto& jc : jb.at("cells")) {
        RateCell c;
        c.k = jc.at("k").get<int>();
        c.status = jc.at("status").get<std::string>();
        c.eps = jc.at("eps").get<std::vector<double>>();
        c.errors = jc.at("errors").get<std::vector<double>>();
        c.estimates = jc.at("estimates").get<std::vector<double>>();
        c.unresolved = jc.at("unresolved").get<std::vector<bool>>();
        c.slope = jc.at("slope").get<double>();
        c.constant = jc.at("constant").get<double>();
        c.r2 = jc.at("r2").get<double>();
        c.points = jc.at("points").get<int>();
        if (!jc.at("pass").is_null()) c.pass = jc.at("pass").get<bool>();
        b.cells.push_back(std::move(c));
      }
      b.c_growth = growth_from_json(jb.at("c_growth"));
      b.lambda_growth = growth_from_json(jb.at("lambda_growth"));
      b.theorem_constant = jb.at("theorem_constant").get<std::vector<double>>();
      b.theorem_constant_bounded = jb.at("theorem_constant_bounded").get<bool>();
      rep.bcs.push_back(std::move(b));
    }
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed rate report: ") + e.what());
  }
}

json to_json(const std::vector<OrderingCheck>& checks) {
  json arr = json::array();
  for (const auto& c : checks) {
    json j;
    j["k"] = c.k;
    j["epsilon"] = scale_json(c.eps);
    j["relation"] = c.relation;
    j["lhs"] = c.lhs;
    j["rhs"] = c.rhs;
    j["pass"] = c.pass;
    arr.push_back(std::move(j));
  }
  return arr;
}

json to_json(const Spectrum& s) {
  json j;
  j["bc"] = bc_json(s.bc);
  j["epsilon"] = scale_json(s.epsilon);
  j["solver"] = s.solver;
  j["tol"] = s.tol;
  j["values"] = s.values;
  j["errors"] = s.errors;
  j["residuals"] = s.residuals;
  j["flags"] = s.flags;
  return j;
}

}  // namespace homogeig
