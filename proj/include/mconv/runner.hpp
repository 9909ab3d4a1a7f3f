#pragma once

#include "mconv/report.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mconv {

/// Process exit codes of the batch runner.
enum ExitCode : int {
  kExitOk = 0,
  /// An executed check failed (exact-mode violation, tolerance exceeded,
  /// success rate below target, or statistical failure after all retries).
  kExitCheckFailed = 1,
  /// Usage, configuration, or input-file error; nothing was checked.
  kExitUsage = 2,
  /// An approximation request violates its slack condition.
  kExitUnsolvable = 3,
};

/// Invalid scenario configuration. The message carries the location: a line
/// and column for syntax errors, a JSON path for semantic ones.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses scenario JSON; syntax errors become ConfigError with line:column.
nlohmann::json parse_config(std::string_view text);

struct RunRequest {
  /// verify, approximate, or ellis.
  std::string command;
  /// A single scenario object or {"scenarios": [...]}.
  nlohmann::json config;
  /// Directory that relative table paths resolve against first.
  std::string base_dir = ".";
  /// Command-line overrides applied to every scenario.
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  /// Scenarios run concurrently when > 1; records keep scenario order.
  std::size_t jobs = 1;
};

struct RunResult {
  int exit_code = kExitOk;
  Report report;
};

/// Runs every scenario of the request. Never throws for scenario-level
/// problems: configuration errors yield kExitUsage with an error record.
RunResult run_scenarios(const RunRequest& request);

/// Default single-scenario config used when no --config is given.
nlohmann::json default_scenario(std::string_view command, std::string_view system);

/// One-shot convolution: measure texts in, measure text out. `system` is a
/// built-in name or a table path; `mode` is "exact" or "float".
std::string run_convolve(std::string_view system, std::string_view mu_text, std::string_view nu_text,
                         std::string_view mode, const std::string& base_dir = ".");

/// Resolves a path against base_dir, then against $MCONV_SCENARIO_DIR.
std::string resolve_path(const std::string& path, const std::string& base_dir);

inline constexpr const char* kScenarioDirEnv = "MCONV_SCENARIO_DIR";

}  // namespace mconv
