#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "config.hpp"
#include "homogeig/fit.hpp"
#include "homogeig/parallel.hpp"
#include "svg.hpp"

namespace homogeig::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr double kOscillationMinSlope = 0.9;

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// File-name friendly form of a label: "robin(0.5)" -> "robin_0.5".
std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-';
    if (keep)
      out += c;
    else if (!out.empty() && out.back() != '_')
      out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// All output goes through one writer on the calling thread; files are
// written to a temporary name and renamed into place.
class Writer {
 public:
  void put(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + tmp.string() + "'");
      out << content;
      if (!out) throw Error(ErrorCode::InvalidArgument, "write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
    written_.push_back(path.string());
  }
  const std::vector<std::string>& written() const { return written_; }

 private:
  std::vector<std::string> written_;
};

struct Run {
  RunConfig cfg;
  GlobalOptions opts;
  fs::path run_dir;
  fs::path cache_dir;
  Writer writer;
  /// "hit", "miss", "off" (--no-cache) or "none" (nothing cacheable).
  std::string cache = "none";
};

fs::path output_root(const GlobalOptions& g, const RunConfig& cfg) {
  if (const char* env = std::getenv("HOMOGEIG_OUT"); env && *env) return env;
  if (g.out) return *g.out;
  return cfg.output;
}

std::optional<json> cached(Run& r, const std::string& name) {
  if (r.opts.no_cache) return std::nullopt;
  const auto text = read_file(r.cache_dir / name);
  if (!text) return std::nullopt;
  try {
    return json::parse(*text);
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

void store(Run& r, const std::string& name, const json& j, bool hit) {
  if (hit) {
    r.cache = "hit";
    return;
  }
  if (r.opts.no_cache) {
    r.cache = "off";
    return;
  }
  r.writer.put(r.cache_dir / name, dump(j));
  r.cache = "miss";
}

void status(Run& r, const std::string& command, std::ostream& out) {
  json j;
  j["command"] = command;
  j["experiment"] = r.cfg.experiment;
  j["config_hash"] = r.cfg.hash;
  j["cache"] = r.cache;
  j["outputs"] = r.writer.written();
  r.writer.put(r.run_dir / (command + ".status.json"), dump(j));
  out << command << ": cache " << r.cache << ", config " << r.cfg.hash.substr(0, 12) << ", outputs in "
      << r.run_dir.string() << "\n";
}

SweepTable get_sweep(Run& r, bool common_discretization) {
  if (!r.cfg.has_sweep) throw ConfigError("sweep", "section required by this command");
  SolverSettings solver = r.cfg.solver;
  // Ordering checks compare conditions on one mesh, not extrapolated values.
  const bool separate = common_discretization && r.cfg.base.dimension() == 2 && solver.richardson;
  if (separate) solver.richardson = false;
  const std::string name = separate ? "audit_sweep.json" : "sweep.json";
  if (auto j = cached(r, name)) {
    try {
      SweepTable t = sweep_from_json(*j);
      if (t.config_hash == r.cfg.hash) {
        store(r, name, *j, true);
        return t;
      }
    } catch (const Error&) {
    }
  }
  SweepSpec spec{r.cfg.experiment, r.cfg.base, r.cfg.bcs, r.cfg.ks, r.cfg.eps, solver, r.opts.timing};
  SweepTable t = sweep(spec, r.opts.jobs);
  t.config_hash = r.cfg.hash;
  store(r, name, to_json(t), false);
  return t;
}

BoundaryCondition pick_bc(const RunConfig& cfg, const std::string& tag) {
  if (tag.empty()) return cfg.bcs.front();
  for (const auto& bc : cfg.bcs)
    if (bc.label() == tag) return bc;
  for (const auto& bc : cfg.bcs)
    if (to_string(bc.kind) == tag || std::string(1, bc_letter(bc.kind)) == tag) return bc;
  try {
    const auto colon = tag.find(':');
    if (colon != std::string::npos) return parse_bc(tag.substr(0, colon), std::stod(tag.substr(colon + 1)));
    return parse_bc(tag);
  } catch (const std::exception& e) {
    throw ConfigError("--bc", "unknown boundary condition '" + tag + "'");
  }
}

Scale parse_scale(const std::string& s) {
  if (s == "averaged") return kAveraged;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && v > 0.0 && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("--eps", "expected 'averaged' or a positive number, got '" + s + "'");
}

int cmd_solve(Run& r, const SolveOptions& so, std::ostream& out) {
  const BoundaryCondition bc = pick_bc(r.cfg, so.bc);
  const Scale eps = parse_scale(so.eps);
  const int k_max = so.k_max.value_or(r.cfg.k_max);
  if (k_max < 1) throw ConfigError("--k-max", "must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const Spectrum s = solve_spectrum(r.cfg.base.with_bc(bc).at_scale(eps), k_max, r.cfg.solver);
  const double wall =
      r.opts.timing ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() : 0.0;

  json j;
  j["experiment"] = r.cfg.experiment;
  j["config_hash"] = r.cfg.hash;
  j["spectrum"] = to_json(s);
  SweepTable rows;
  for (int k = 1; k <= s.size(); ++k) {
    SweepRow row{bc, k, eps, s.values[k - 1], s.errors[k - 1], s.residuals[k - 1], s.flags[k - 1], s.solver, s.tol, wall};
    rows.rows.push_back(std::move(row));
  }
  std::ostringstream csv;
  write_sweep_csv(csv, rows, r.cfg.experiment);
  const std::string stem = "solve_" + slug(bc.label()) + "_" + slug(scale_label(eps));
  r.writer.put(r.run_dir / (stem + ".json"), dump(j));
  r.writer.put(r.run_dir / (stem + ".csv"), csv.str());

  out << "solve " << r.cfg.experiment << "  bc=" << bc.label() << "  eps=" << scale_label(eps) << "  solver=" << s.solver
      << "\n";
  char line[160];
  std::snprintf(line, sizeof line, "%4s  %24s  %12s  %s\n", "k", "lambda", "error", "flags");
  out << line;
  for (int k = 1; k <= s.size(); ++k) {
    std::snprintf(line, sizeof line, "%4d  %24.17g  %12.3e  %s\n", k, s.values[k - 1], s.errors[k - 1],
                  s.flags[k - 1].c_str());
    out << line;
  }
  status(r, "solve", out);
  return kExitOk;
}

int cmd_sweep(Run& r, std::ostream& out) {
  const SweepTable t = get_sweep(r, false);
  std::ostringstream csv;
  write_sweep_csv(csv, t, r.cfg.experiment);
  r.writer.put(r.run_dir / "sweep.csv", csv.str());
  r.writer.put(r.run_dir / "sweep.json", dump(to_json(t)));
  out << "sweep " << r.cfg.experiment << ": " << t.rows.size() << " rows\n";
  for (const auto& bc : t.conditions()) {
    out << "  " << bc.label() << " averaged:";
    for (int k : t.ks(bc)) out << ' ' << fmt_short(t.find(bc, k, kAveraged)->lambda);
    out << "\n";
  }
  status(r, "sweep", out);
  return kExitOk;
}

int cmd_rates(Run& r, std::ostream& out) {
  if (r.cfg.has_sweep && r.cfg.eps.size() < 4) throw ConfigError("sweep.eps", "rate fits need at least 4 values");
  const SweepTable t = get_sweep(r, false);
  const RateReport rep = fit_rate(t);
  std::ostringstream csv;
  csv << "experiment,bc,k,status,slope,constant,r2,points,pass\n";
  for (const auto& br : rep.bcs)
    for (const auto& c : br.cells) {
      std::string bc = br.bc.label();
      if (bc.find(',') != std::string::npos) bc = "\"" + bc + "\"";
      csv << r.cfg.experiment << ',' << bc << ',' << c.k << ',' << c.status << ',' << fmt(c.slope) << ','
          << fmt(c.constant) << ',' << fmt(c.r2) << ',' << c.points << ','
          << (c.pass ? (*c.pass ? "true" : "false") : "") << '\n';
    }
  r.writer.put(r.run_dir / "rates.json", dump(to_json(rep)));
  r.writer.put(r.run_dir / "rates.csv", csv.str());

  out << "rates " << r.cfg.experiment << "\n";
  char line[200];
  for (const auto& br : rep.bcs) {
    out << "  " << br.bc.label() << "\n";
    for (const auto& c : br.cells) {
      if (c.status == kStatusOk)
        std::snprintf(line, sizeof line, "    k=%-3d slope %7.3f  C %10.3e  R2 %6.4f  %s\n", c.k, c.slope, c.constant, c.r2,
                      c.pass ? (*c.pass ? "PASS" : "FAIL") : "R2 below threshold");
      else
        std::snprintf(line, sizeof line, "    k=%-3d %s\n", c.k, c.status.c_str());
      out << line;
    }
    auto growth = [&](const char* name, const GrowthFit& g) {
      if (g.status == kStatusOk)
        std::snprintf(line, sizeof line, "    %s growth exponent %.3f (reference %.3f) %s\n", name, g.exponent, g.reference,
                      g.pass ? "PASS" : "FAIL");
      else
        std::snprintf(line, sizeof line, "    %s growth %s\n", name, g.status.c_str());
      out << line;
    };
    growth("C_k", br.c_growth);
    growth("lambda_k", br.lambda_growth);
  }
  status(r, "rates", out);
  return kExitOk;
}

int cmd_audit(Run& r, std::ostream& out) {
  const SweepTable t = get_sweep(r, true);
  const auto checks = audit_ordering(t);
  const bool all = std::all_of(checks.begin(), checks.end(), [](const OrderingCheck& c) { return c.pass; });

  json j;
  j["experiment"] = r.cfg.experiment;
  j["config_hash"] = r.cfg.hash;
  j["solver"] = t.rows.empty() ? "" : t.rows.front().solver;
  j["all_pass"] = all;
  j["checks"] = to_json(checks);

  // Pass matrix: one row per (eps, relation), one column per k.
  std::vector<int> ks;
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::map<int, bool>> cell;
  for (const auto& c : checks) {
    const auto key = std::make_pair(scale_label(c.eps), c.relation);
    if (!cell.count(key)) keys.push_back(key);
    cell[key][c.k] = c.pass;
    if (std::find(ks.begin(), ks.end(), c.k) == ks.end()) ks.push_back(c.k);
  }
  std::sort(ks.begin(), ks.end());
  std::ostringstream csv;
  csv << "epsilon,relation";
  for (int k : ks) csv << ",k" << k;
  csv << "\n";
  out << "audit " << r.cfg.experiment << ": " << checks.size() << " checks, " << (all ? "all pass" : "FAILURES") << "\n";
  for (const auto& key : keys) {
    csv << key.first << ",\"" << key.second << "\"";
    char head[120];
    std::snprintf(head, sizeof head, "  %-10s %-28s", key.first.c_str(), key.second.c_str());
    out << head;
    for (int k : ks) {
      const auto it = cell[key].find(k);
      const char* mark = it == cell[key].end() ? "" : (it->second ? "PASS" : "FAIL");
      csv << ',' << mark;
      out << ' ' << (it == cell[key].end() ? "  - " : mark);
    }
    csv << "\n";
    out << "\n";
  }
  r.writer.put(r.run_dir / "audit.json", dump(j));
  r.writer.put(r.run_dir / "audit.csv", csv.str());
  status(r, "audit", out);
  return kExitOk;
}

json oscillation_report(const RunConfig& cfg, int jobs) {
  const auto& os = *cfg.oscillation;
  const OscillationFit gaps = oscillation_gaps(os.probe, os.eps, jobs);
  json j;
  j["experiment"] = cfg.experiment;
  j["config_hash"] = cfg.hash;
  j["space"] = to_string(os.probe.space);
  j["family"] = to_string(os.probe.family);
  j["family_size"] = os.probe.family_size;
  j["seed"] = os.probe.seed;
  j["eps"] = gaps.eps;
  j["max_gap"] = gaps.max_gap;
  j["max_ratio"] = gaps.max_ratio;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < gaps.eps.size(); ++i)
    if (gaps.max_gap[i] >= 1e-13) {
      xs.push_back(gaps.eps[i]);
      ys.push_back(gaps.max_gap[i]);
    }
  if (xs.size() < 2) {
    j["status"] = kStatusDegenerate;
    j["slope"] = nullptr;
    j["constant"] = nullptr;
    j["r2"] = nullptr;
    j["pass"] = nullptr;
    return j;
  }
  const LogLogFit f = fit_loglog(xs, ys);
  j["status"] = kStatusOk;
  j["slope"] = f.slope;
  j["constant"] = f.constant();
  j["r2"] = f.r2;
  j["min_slope"] = kOscillationMinSlope;
  j["pass"] = f.slope >= kOscillationMinSlope;
  return j;
}

int cmd_oscillation(Run& r, std::ostream& out) {
  if (!r.cfg.oscillation) throw ConfigError("oscillation", "section required by this command");
  json j;
  if (auto c = cached(r, "oscillation.json"); c && c->value("config_hash", "") == r.cfg.hash) {
    j = *c;
    store(r, "oscillation.json", j, true);
  } else {
    j = oscillation_report(r.cfg, r.opts.jobs);
    store(r, "oscillation.json", j, false);
  }
  std::ostringstream csv;
  csv << "epsilon,max_gap,max_ratio\n";
  for (std::size_t i = 0; i < j["eps"].size(); ++i)
    csv << fmt(j["eps"][i].get<double>()) << ',' << fmt(j["max_gap"][i].get<double>()) << ','
        << fmt(j["max_ratio"][i].get<double>()) << "\n";
  r.writer.put(r.run_dir / "oscillation.json", dump(j));
  r.writer.put(r.run_dir / "oscillation.csv", csv.str());
  out << "oscillation " << r.cfg.experiment << " (" << j["space"].get<std::string>() << ", "
      << j["family"].get<std::string>() << ", " << j["family_size"].get<int>() << " functions)\n";
  for (std::size_t i = 0; i < j["eps"].size(); ++i)
    out << "  eps " << fmt_short(j["eps"][i].get<double>()) << "  max gap " << fmt_short(j["max_gap"][i].get<double>())
        << "\n";
  if (j["status"] == kStatusOk)
    out << "  slope " << fmt_short(j["slope"].get<double>()) << "  R2 " << fmt_short(j["r2"].get<double>()) << "  "
        << (j["pass"].get<bool>() ? "PASS" : "FAIL") << "\n";
  else
    out << "  " << j["status"].get<std::string>() << " (all gaps below 1e-13)\n";
  status(r, "oscillation", out);
  return kExitOk;
}

int cmd_check_operator(Run& r, std::ostream& out, std::ostream& err) {
  const auto& prob = r.cfg.base;
  const HypothesisReport rep =
      sample_hypotheses(diffusion_law(prob.op(), prob.dimension()), prob.domain(), r.cfg.check_samples, r.cfg.seed);
  const auto failing = rep.failing();
  json j;
  j["experiment"] = r.cfg.experiment;
  j["config_hash"] = r.cfg.hash;
  j["samples"] = rep.samples;
  j["seed"] = r.cfg.seed;
  j["h0_vacuous"] = rep.h0_vacuous;
  j["h1_monotonicity"] = rep.h1_monotonicity;
  j["h2_coercivity"] = rep.h2_coercivity;
  j["h3_continuity"] = rep.h3_continuity;
  j["h4_homogeneity"] = rep.h4_homogeneity;
  j["h5_oddness"] = rep.h5_oddness;
  j["h6_ratio_max"] = rep.h6_ratio_max;
  j["h6_ratio_median"] = rep.h6_ratio_median;
  j["h7_cyclic"] = rep.h7_cyclic;
  j["h8_strict"] = rep.h8_strict;
  j["h8_alpha_estimate"] = rep.h8_alpha_estimate;
  j["failing"] = failing;
  j["status"] = failing.empty() ? std::string("PASS") : "REJECTED(" + failing.front() + ")";
  r.writer.put(r.run_dir / "operator_check.json", dump(j));

  out << "check-operator " << r.cfg.experiment << ": " << rep.samples << " samples, seed " << r.cfg.seed << "\n";
  const std::pair<const char*, double> rows[] = {
      {"H1 monotonicity", rep.h1_monotonicity}, {"H2 coercivity", rep.h2_coercivity},
      {"H3 continuity", rep.h3_continuity},     {"H4 homogeneity", rep.h4_homogeneity},
      {"H5 oddness", rep.h5_oddness},           {"H7 cyclic (k=2)", rep.h7_cyclic},
      {"H8 strict", rep.h8_strict}};
  char line[120];
  for (const auto& [name, v] : rows) {
    std::snprintf(line, sizeof line, "  %-18s %12.3e\n", name, v);
    out << line;
  }
  std::snprintf(line, sizeof line, "  %-18s max %.3e  median %.3e (report only)\n", "H6 ratio", rep.h6_ratio_max,
                rep.h6_ratio_median);
  out << line;
  status(r, "check-operator", out);
  if (!failing.empty()) {
    err << "error: REJECTED(" << failing.front() << "): the configured operator violates hypothesis "
        << failing.front() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

int cmd_plot(const std::string& report_path, std::ostream& out) {
  const auto text = read_file(report_path);
  if (!text) throw ConfigError("--report", "cannot read '" + report_path + "'");
  RateReport rep;
  try {
    rep = rate_report_from_json(json::parse(*text));
  } catch (const json::exception& e) {
    throw ConfigError("--report", std::string("malformed report: ") + e.what());
  } catch (const Error& e) {
    throw ConfigError("--report", e.detail());
  }
  if (rep.bcs.empty()) throw ConfigError("--report", "report has no conditions to plot");
  Writer w;
  const fs::path dir = fs::path(report_path).parent_path();
  for (const auto& br : rep.bcs) w.put(dir / ("plot_" + slug(br.bc.label()) + ".svg"), rate_plot_svg(rep, br));
  for (const auto& f : w.written()) out << "wrote " << f << "\n";
  return kExitOk;
}

void print_error(const Error& e, std::ostream& err) {
  // Sweep errors list one entry per failing cell.
  const std::string what = e.what();
  const std::string head = what.substr(0, what.size() - e.detail().size());
  err << "error: " << head;
  if (e.detail().find("; cell (") == std::string::npos) {
    err << e.detail() << "\n";
    return;
  }
  err << "failing cells:\n";
  std::size_t start = 0;
  while (start < e.detail().size()) {
    std::size_t end = e.detail().find("; cell (", start);
    if (end == std::string::npos) end = e.detail().size();
    err << "  " << e.detail().substr(start, end - start) << "\n";
    start = end == e.detail().size() ? end : end + 2;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Eigenvalues of periodically oscillating quasilinear problems and their homogenization rates."};
  app.name("homogeig");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  g.jobs = default_jobs();
  std::string out_dir;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "Run configuration (JSON, see docs/config.schema.json)");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory (HOMOGEIG_OUT overrides)");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Seed, overriding the config");
  app.add_flag("--no-cache", g.no_cache, "Neither read nor write cached results");
  app.add_flag("--timing", g.timing, "Record wall times (outputs then vary between runs)");

  SolveOptions so;
  int k_max = 0;
  auto* solve = app.add_subcommand("solve", "Spectrum of one condition at one scale");
  solve->add_option("--bc", so.bc, "Condition: a label from the config, a kind, or robin:BETA");
  solve->add_option("--eps", so.eps, "Scale, or 'averaged'");
  auto* kmax_opt = solve->add_option("--k-max", k_max, "Number of eigenvalues");
  auto* sweep_cmd = app.add_subcommand("sweep", "Eigenvalues over the configured conditions, ks and scales");
  auto* rates = app.add_subcommand("rates", "Rate fits of a sweep");
  auto* audit = app.add_subcommand("audit", "Ordering chain between conditions");
  auto* osc = app.add_subcommand("oscillation", "Oscillating-integral gap rates");
  std::string report;
  auto* plot = app.add_subcommand("plot", "SVG plots of a rate report");
  plot->add_option("--report", report, "rates.json to plot (default: the config's)");
  auto* check = app.add_subcommand("check-operator", "Sampled hypothesis check of the configured operator");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (out_opt->count()) g.out = out_dir;
  if (seed_opt->count()) g.seed = seed;
  if (kmax_opt->count()) so.k_max = k_max;

  try {
    if (plot->parsed() && !report.empty()) return cmd_plot(report, out);
    if (g.config.empty()) throw ConfigError("--config", "required");
    Run r{load_config(g.config, LoadOptions{g.seed, g.timing}), g, {}, {}, {}, "none"};
    const fs::path root = output_root(g, r.cfg);
    r.run_dir = root / r.cfg.experiment;
    r.cache_dir = root / "cache" / r.cfg.hash;
    if (plot->parsed()) return cmd_plot((r.run_dir / "rates.json").string(), out);
    if (solve->parsed()) return cmd_solve(r, so, out);
    if (sweep_cmd->parsed()) return cmd_sweep(r, out);
    if (rates->parsed()) return cmd_rates(r, out);
    if (audit->parsed()) return cmd_audit(r, out);
    if (osc->parsed()) return cmd_oscillation(r, out);
    if (check->parsed()) return cmd_check_operator(r, out, err);
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    print_error(e, err);
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace homogeig::cli
