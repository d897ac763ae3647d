#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "homogeig/problems.hpp"
#include "homogeig/spectrum.hpp"

namespace homogeig {

struct SolverSettings {
  /// Shooting bracket tolerance (1D) and pencil residual bound (2D).
  double tol = 1e-9;
  double lambda_cap = 1e12;
  /// 2D: smallest number of cells per unit length.
  int min_cells = 16;
  int dense_limit = 500;
  /// 2D: use the Richardson reference spectrum (two meshes) instead of a
  /// single mesh.
  bool richardson = true;
  /// 2D: meshes per Richardson reference, 2 or 3 (see reference_spectrum).
  int richardson_levels = 2;
};

/// Shooting for N = 1, finite elements for N = 2.
Spectrum solve_spectrum(const ProblemInstance& prob, int k_max, const SolverSettings& settings);

struct SweepRow {
  BoundaryCondition bc;
  int k = 0;
  Scale eps;
  double lambda = 0.0;
  /// Error estimate of lambda from the solver.
  double error = 0.0;
  double residual = 0.0;
  std::string flags;
  std::string solver;
  double tol = 0.0;
  /// Wall time of the solve that produced the row (shared by all k of one
  /// spectrum); zero unless timing was requested.
  double wall_ms = 0.0;
};

/// lambda_k^eps next to lambda_k. Rows are ordered by condition, then
/// scale with the averaged row first and eps decreasing, then k.
struct SweepTable {
  std::string family_id;
  std::string config_hash;
  int dimension = 1;
  double p = 2.0;
  double tol = 0.0;
  std::vector<SweepRow> rows;

  const SweepRow* find(const BoundaryCondition& bc, int k, const Scale& eps) const;
  std::vector<BoundaryCondition> conditions() const;
  std::vector<int> ks(const BoundaryCondition& bc) const;
  /// Finite scales present for `bc`, decreasing.
  std::vector<double> scales(const BoundaryCondition& bc) const;
};

struct SweepSpec {
  std::string family_id;
  /// Domain, operator and weights; its condition and scale are ignored.
  ProblemInstance base;
  std::vector<BoundaryCondition> bcs;
  std::vector<int> ks;
  std::vector<double> eps;
  SolverSettings solver;
  bool timing = false;
};

/// One solve per (condition, scale) cell, the averaged limit included, run
/// on up to `jobs` threads. The table does not depend on `jobs`. Solver
/// errors are collected over all cells and rethrown as one error with the
/// code and index of the first failing cell and one "cell (bc=..., eps=...)"
/// entry per failure in the message.
SweepTable sweep(const SweepSpec& spec, int jobs = 1);

struct RateThresholds {
  double min_slope = 0.9;
  double min_r2 = 0.95;
  /// Allowed excess of the C_k growth exponent over its reference.
  double c_growth_slack = 0.5;
  /// Interior conditions: |exponent - p/N| <= rel * p/N for lambda_k.
  double lambda_growth_rel = 0.15;
  /// Steklov: exponent <= (1 + rel) (p - 1)/(N - 1) for lambda_k.
  double steklov_growth_rel = 0.30;
  /// A point is unresolved when its error estimate exceeds this fraction of
  /// the smallest homogenization error of the sweep.
  double resolution_fraction = 0.1;
};

inline constexpr const char* kStatusOk = "OK";
inline constexpr const char* kStatusDegenerate = "DEGENERATE_FIT";
inline constexpr const char* kStatusUnresolved = "UNRESOLVED";
/// Growth fits with fewer than two usable k.
inline constexpr const char* kStatusInsufficient = "INSUFFICIENT";

/// |lambda_k^eps - lambda_k| ~ C_k eps^s_k for one (condition, k).
struct RateCell {
  int k = 0;
  std::string status = kStatusOk;
  std::vector<double> eps;
  /// |lambda_k^eps - lambda_k| per eps.
  std::vector<double> errors;
  /// Error estimate of the difference (solver errors of both values).
  std::vector<double> estimates;
  std::vector<bool> unresolved;
  double slope = 0.0;
  double constant = 0.0;
  double r2 = 0.0;
  int points = 0;
  /// slope >= min_slope; set only when status is OK and r2 >= min_r2.
  std::optional<bool> pass;
};

/// A growth exponent in k.
struct GrowthFit {
  std::string status = kStatusOk;
  std::vector<int> ks;
  /// The fitted values, one per k.
  std::vector<double> values;
  double exponent = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double reference = 0.0;
  /// Largest exponent (and for lambda_k of interior conditions, the
  /// smallest) accepted.
  double upper = 0.0;
  std::optional<double> lower;
  bool pass = false;
};

struct BcRates {
  BoundaryCondition bc;
  std::vector<RateCell> cells;
  /// log C_k against log k, reference 2p/N or (p-1)/(N-1) for Steklov.
  GrowthFit c_growth;
  /// log lambda_k against log k, reference p/N or (p-1)/(N-1) for Steklov.
  GrowthFit lambda_growth;
  /// max_k |lambda_k^eps - lambda_k| / (k^q eps) per eps (q the C_k
  /// reference): the constant of the estimate, which must not grow as eps
  /// shrinks.
  std::vector<double> theorem_constant;
  bool theorem_constant_bounded = false;
};

struct RateReport {
  std::string family_id;
  std::string config_hash;
  int dimension = 1;
  double p = 2.0;
  RateThresholds thresholds;
  std::vector<BcRates> bcs;
};

/// Needs, for every condition, the averaged row and >= 4 geometric scales
/// for each k; throws INVALID_ARGUMENT otherwise. Cells whose errors all sit
/// at the solver floor get DEGENERATE_FIT, cells with fewer than 4 resolved
/// points UNRESOLVED; neither throws.
RateReport fit_rate(const SweepTable& table, const RateThresholds& thresholds = {});

/// Fitted exponent of log value against log k, passing when it lies in
/// [lower, upper]. Throws INVALID_ARGUMENT with fewer than 2 points or
/// nonpositive values.
GrowthFit growth_exponent(const std::vector<int>& ks, const std::vector<double>& values, double reference,
                          double upper, std::optional<double> lower = std::nullopt);

struct OrderingCheck {
  int k = 0;
  Scale eps;
  /// "lhs<=rhs" with the condition labels, e.g. "neumann<=robin(2)".
  std::string relation;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// Checks lambda^B <= lambda^N <= min(lambda^P, lambda^R) <=
/// max(lambda^P, lambda^R) <= lambda^D and lambda^B <= lambda^S for every
/// k and scale present, with slack 1e-8 max(1, |rhs|), as the pairwise
/// relations B<=N, N<=P, N<=R, P<=D, R<=D, B<=S (one per Robin
/// coefficient present). Relations involving a missing condition are
/// skipped.
std::vector<OrderingCheck> audit_ordering(const SweepTable& table);

/// CSV with header experiment,bc,k,epsilon,lambda,tol,solver,wall_ms.
/// Numbers use 17 significant digits; epsilon is "averaged" for the limit.
void write_sweep_csv(std::ostream& out, const SweepTable& table, const std::string& experiment);

nlohmann::ordered_json to_json(const SweepTable& table);
SweepTable sweep_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const RateReport& report);
RateReport rate_report_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const std::vector<OrderingCheck>& checks);
nlohmann::ordered_json to_json(const Spectrum& spectrum);

}  // namespace homogeig
