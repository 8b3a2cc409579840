#pragma once

#include "stratlearn/backend.hpp"
#include "stratlearn/manifest.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace stratlearn {

/// The solver process could not be started or waited for.
class LaunchError : public BackendError {
public:
  using BackendError::BackendError;
};

/// The solver output held no line matching the metric pattern.
class MetricParseError : public BackendError {
public:
  using BackendError::BackendError;
};

/// The solver exited with a code that maps to no verdict.
class ExitCodeError : public BackendError {
public:
  ExitCodeError(int code)
      : BackendError("unexpected exit code " + std::to_string(code)),
        code_(code) {}
  int code() const { return code_; }

private:
  int code_;
};

struct SolverAdapterConfig {
  /// Shell command with `{problem}` and one `{name}` per parameter.
  std::string command_template;
  int sat_exit = 10;
  int unsat_exit = 20;
  /// Exit code the solver uses when it stops on the budget flag.
  std::optional<int> unknown_exit;
  /// ECMAScript regex searched per output line; the first capture group (or
  /// the text after the match) is the metric. The last matching line wins.
  std::string metric_pattern = R"(^c\s+conflicts:\s+([0-9]+(\.[0-9]*)?))";
  /// Appended to the command when a budget applies, with `{budget}`.
  std::optional<std::string> metric_budget_flag;
  /// Wall-clock kill switch in seconds; 0 disables it.
  double timeout_seconds = 0.0;

  /// Checks placeholders against the space: every parameter exactly once,
  /// `{problem}` present, nothing unknown.
  void validate(const StrategySpace &space) const;
};

/// `key = value` lines: command, sat_exit, unsat_exit, unknown_exit,
/// metric_pattern, budget_flag, timeout_seconds.
SolverAdapterConfig parse_adapter_config(std::string_view text);
SolverAdapterConfig load_adapter_config(const std::filesystem::path &path);

/// Expands the command template for one call. Values are shell-quoted.
std::string render_command(const SolverAdapterConfig &config,
                           const StrategySpace &space,
                           const std::string &problem,
                           const Strategy &strategy,
                           std::optional<double> budget);

/// Runs one solver process. Exit codes map to SAT/UNSAT; a metric above the
/// budget (or the budget stop code) yields ABORTED.
SolveOutcome evaluate_external(const SolverAdapterConfig &config,
                               const StrategySpace &space,
                               const std::string &problem,
                               const Strategy &strategy,
                               std::optional<double> budget);

class ExternalBackend final : public Backend {
public:
  ExternalBackend(SolverAdapterConfig config, ProblemManifest manifest,
                  const StrategySpace &space);

  std::size_t problem_count() const override { return manifest_.size(); }
  SolveOutcome evaluate(std::size_t index, const Strategy &strategy,
                        std::optional<double> budget) override;

  const ProblemManifest &manifest() const { return manifest_; }

private:
  SolverAdapterConfig config_;
  ProblemManifest manifest_;
  const StrategySpace &space_;
};

} // namespace stratlearn
