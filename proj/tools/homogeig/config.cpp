#include "config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "schema.hpp"

namespace homogeig::cli {
namespace {

using json = nlohmann::json;

constexpr const char* kHashDomain = "homogeig-config/1\n";

std::string at(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Every number as a double, so 2 and 2.0 hash alike.
json numbers_as_double(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() || j.is_object()) {
    json out = j;
    for (auto& x : out) x = numbers_as_double(x);
    return out;
  }
  return j;
}

std::vector<double> geometric(std::vector<double> eps, const std::string& path) {
  std::sort(eps.begin(), eps.end(), std::greater<>());
  if (std::adjacent_find(eps.begin(), eps.end()) != eps.end()) throw ConfigError(path, "values must be distinct");
  for (std::size_t i = 2; i < eps.size(); ++i) {
    const double q = eps[1] / eps[0];
    if (std::abs(eps[i] / eps[i - 1] - q) > 1e-9 * q) throw ConfigError(path, "values must form a geometric sequence");
  }
  return eps;
}

Domain domain_from_json(const json& j, const std::string& path) {
  const int dim = j.at("dimension").get<int>();
  if (dim == 1) {
    for (const char* k : {"width", "height"})
      if (j.contains(k)) throw ConfigError(at(path, k), "only allowed for dimension 2");
    return Domain::interval(j.value("length", 1.0));
  }
  if (j.contains("length")) throw ConfigError(at(path, "length"), "only allowed for dimension 1");
  return Domain::rectangle(j.value("width", 1.0), j.value("height", 1.0));
}

OperatorSpec operator_from_json(const json& j, const std::string& path) {
  const double p = j.at("p").get<double>();
  const double alpha = j.at("alpha").get<double>();
  const double beta = j.at("beta").get<double>();
  try {
    if (!j.contains("A")) {
      if (alpha == 1.0 && beta == 1.0) return OperatorSpec::p_laplacian(p);
      return OperatorSpec::scalar(p, SpatialField(1.0), alpha, beta);
    }
    const json& a = j["A"];
    if (a.contains("kind")) return OperatorSpec::scalar(p, field_from_json(a, at(path, "A")), alpha, beta);
    if (p != 2.0) throw ConfigError(at(path, "A"), "a matrix coefficient needs p = 2");
    return OperatorSpec::matrix(field_from_json(a["a11"], at(path, "A.a11")),
                                field_from_json(a["a12"], at(path, "A.a12")),
                                field_from_json(a["a22"], at(path, "A.a22")), alpha, beta);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.detail());
  }
}

}  // namespace

ConfigError::ConfigError(const std::string& field, const std::string& detail)
    : Error(ErrorCode::Config, (field.empty() ? std::string("config") : field) + ": " + detail), field_(field) {}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::InvalidArgument, "SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

CoefficientField field_from_json(const json& j, const std::string& path) {
  const std::string kind = j.at("kind").get<std::string>();
  if (j.contains("lo") != j.contains("hi")) throw ConfigError(path, "lo and hi must be given together");
  try {
    CoefficientField f = CoefficientField::constant(0.0);
    if (kind == "constant") {
      f = CoefficientField::constant(j.at("value").get<double>());
    } else if (kind == "piecewise") {
      auto values = j.at("values").get<std::vector<double>>();
      const int n = static_cast<int>(values.size());
      const int nx = j.value("nx", j.contains("ny") ? n / j["ny"].get<int>() : n);
      const int ny = j.value("ny", 1);
      if (nx * ny != n) throw ConfigError(at(path, "values"), "expected nx * ny = " + std::to_string(nx * ny) + " values");
      f = CoefficientField::piecewise(std::move(values), nx, ny);
    } else {
      std::vector<TrigTerm> terms;
      for (const auto& t : j.at("terms"))
        terms.push_back({t.at("amplitude").get<double>(), t.at("kx").get<int>(), t.value("ky", 0), t.value("sine", false)});
      f = CoefficientField::trigonometric(j.at("mean").get<double>(), std::move(terms));
    }
    if (j.contains("lo")) f = f.with_bounds(j["lo"].get<double>(), j["hi"].get<double>());
    return f;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.detail());
  }
}

BoundaryCondition bc_from_config(const json& j, const std::string& path) {
  try {
    if (j.is_string()) return parse_bc(j.get<std::string>());
    return BoundaryCondition::robin(j.at("beta").get<double>());
  } catch (const Error& e) {
    throw ConfigError(path, e.detail());
  }
}

RunConfig parse_config(const json& doc, const LoadOptions& opts) {
  const auto& schema = config_schema();
  const auto violations = schema.validate(doc);
  if (!violations.empty()) throw ConfigError(violations.front().path, violations.front().message);

  json full = schema.with_defaults(doc);
  if (opts.seed) full["seed"] = *opts.seed;

  const json& pj = full["problem"];
  const Domain domain = domain_from_json(pj["domain"], "problem.domain");
  const OperatorSpec op = operator_from_json(pj["operator"], "problem.operator");
  const CoefficientField rho = field_from_json(pj["rho"], "problem.rho");
  const CoefficientField v = field_from_json(pj["V"], "problem.V");
  std::vector<BoundaryCondition> bcs;
  for (std::size_t i = 0; i < pj["bcs"].size(); ++i) {
    const std::string path = "problem.bcs[" + std::to_string(i) + "]";
    bcs.push_back(bc_from_config(pj["bcs"][i], path));
    if (std::count(bcs.begin(), bcs.end(), bcs.back()) > 1) throw ConfigError(path, "duplicate boundary condition");
  }

  std::optional<ProblemInstance> base;
  try {
    base.emplace(domain, op, rho, v, bcs.front(), kAveraged);
  } catch (const Error& e) {
    throw ConfigError("problem", e.detail());
  }

  RunConfig cfg(*base);
  cfg.experiment = full["experiment"].get<std::string>();
  cfg.seed = full["seed"].get<std::uint64_t>();
  cfg.output = full["output"].get<std::string>();
  cfg.bcs = bcs;

  const json& sj = full["solver"];
  cfg.solver.tol = sj["tol"].get<double>();
  cfg.solver.lambda_cap = sj["lambda_cap"].get<double>();
  cfg.solver.min_cells = sj["min_cells"].get<int>();
  cfg.solver.dense_limit = sj["dense_limit"].get<int>();
  cfg.solver.richardson = sj["richardson"].get<bool>();
  cfg.solver.richardson_levels = sj["richardson_levels"].get<int>();
  cfg.k_max = sj["k_max"].get<int>();
  if (domain.dimension() == 2 && op.p() != 2.0) throw ConfigError("problem.operator.p", "2D problems need p = 2");

  if (full.contains("sweep")) {
    cfg.has_sweep = true;
    cfg.ks = full["sweep"]["ks"].get<std::vector<int>>();
    std::sort(cfg.ks.begin(), cfg.ks.end());
    cfg.ks.erase(std::unique(cfg.ks.begin(), cfg.ks.end()), cfg.ks.end());
    cfg.eps = geometric(full["sweep"]["eps"].get<std::vector<double>>(), "sweep.eps");
  }
  if (full.contains("oscillation")) {
    const json& oj = full["oscillation"];
    OscillationSection os;
    os.probe.g = field_from_json(oj["g"], "oscillation.g");
    os.probe.domain = domain;
    os.probe.p = op.p();
    os.probe.space = parse_trace_space(oj["space"].get<std::string>());
    os.probe.family = parse_test_family(oj["family"].get<std::string>());
    os.probe.seed = cfg.seed;
    os.probe.family_size = oj["family_size"].get<int>();
    os.eps = geometric(oj["eps"].get<std::vector<double>>(), "oscillation.eps");
    cfg.oscillation = std::move(os);
  }
  cfg.check_samples = full["operator_check"]["samples"].get<int>();

  full.erase("output");
  if (opts.timing) full["timing"] = true;
  cfg.canonical = full;
  cfg.hash = sha256_hex(kHashDomain + numbers_as_double(full).dump());
  return cfg;
}

RunConfig load_config(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", "'" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc, opts);
}

}  // namespace homogeig::cli
