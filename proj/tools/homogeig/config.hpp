#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "homogeig/harness.hpp"
#include "homogeig/oscillation.hpp"

namespace homogeig::cli {

/// Raised for anything wrong with a configuration or a command line; the
/// message starts with the offending field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& detail);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct OscillationSection {
  OscillationProbe probe;
  std::vector<double> eps;
};

struct RunConfig {
  explicit RunConfig(ProblemInstance b) : base(std::move(b)) {}

  std::string experiment;
  std::uint64_t seed = 1;
  /// Output directory named by the file, before --out and HOMOGEIG_OUT.
  std::string output;
  ProblemInstance base;
  std::vector<BoundaryCondition> bcs;
  SolverSettings solver;
  int k_max = 5;
  std::vector<int> ks;
  /// Empty when the file has no sweep section.
  std::vector<double> eps;
  bool has_sweep = false;
  std::optional<OscillationSection> oscillation;
  int check_samples = 1000;

  /// The validated document with defaults filled in, without "output".
  nlohmann::json canonical;
  /// Lower-case hex SHA-256 of the canonical document.
  std::string hash;
};

struct LoadOptions {
  std::optional<std::uint64_t> seed;
  /// Timed runs are hashed apart from untimed ones, since wall_ms enters the
  /// outputs.
  bool timing = false;
};

/// Parses, validates against the published schema and builds the run.
/// Throws ConfigError naming the first offending field.
RunConfig load_config(const std::string& path, const LoadOptions& opts = {});
RunConfig parse_config(const nlohmann::json& doc, const LoadOptions& opts = {});

std::string sha256_hex(const std::string& data);

CoefficientField field_from_json(const nlohmann::json& j, const std::string& path);
BoundaryCondition bc_from_config(const nlohmann::json& j, const std::string& path);

}  // namespace homogeig::cli
