#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace homogeig::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2 };

struct GlobalOptions {
  std::string config;
  std::optional<std::string> out;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  bool no_cache = false;
  bool timing = false;
};

struct SolveOptions {
  /// Empty: the first condition of the config.
  std::string bc;
  std::string eps = "averaged";
  std::optional<int> k_max;
};

/// Parses the command line and runs one subcommand. Diagnostics go to
/// `err`, tables and summaries to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace homogeig::cli
