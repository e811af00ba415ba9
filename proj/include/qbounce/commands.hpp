#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qbounce/config.hpp"
#include "qbounce/perturbation.hpp"

namespace qbounce {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2, kExitChecks = 3 };

struct CommandOptions {
  /// Overrides config.output_dir when non-empty.
  std::filesystem::path out_dir;
  bool quiet = false;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  /// Computed vs printed perturbation corrections for level 1.
  std::vector<ComparisonRow> comparison;

  bool all_passed() const;
  const CheckResult* find(const std::string& name) const;
};

/// Runs the invariant suite for the config's particle and basis.
ValidationReport run_validation(const RunConfig& config);

/// Each command writes its artifacts under the output directory and returns
/// an exit code; exceptions propagate (see run_cli for the mapping).
int cmd_basis(const RunConfig& config, const CommandOptions& options, std::ostream& log);
int cmd_evolve(const RunConfig& config, const CommandOptions& options, std::ostream& log);
int cmd_sweep(const RunConfig& config, const CommandOptions& options, std::ostream& log);
int cmd_validate(const RunConfig& config, const CommandOptions& options, std::ostream& log);

/// Full command-line entry point: parses flags, loads the config, runs the
/// subcommand and maps errors to exit codes (1 validation, 2 numerical,
/// 3 failed checks).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qbounce
