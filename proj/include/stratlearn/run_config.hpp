#pragma once

#include "stratlearn/backend.hpp"
#include "stratlearn/engine.hpp"
#include "stratlearn/report.hpp"
#include "stratlearn/strategy_space.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stratlearn {

/// Bad command line. what() carries the message and usage text.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string space_path;
  std::optional<std::string> manifest_path;
  std::optional<std::string> adapter_path;
  std::optional<std::string> landscape_path;

  /// Learning budget as a fraction of the time limit.
  double budget_fraction = 0.15;
  /// Absolute learning budget; overrides the fraction.
  std::optional<double> budget_seconds;
  std::size_t samples_per_epoch = 100;
  std::size_t strategize_samples = 500;
  std::size_t trees = 50;
  /// Unset means ceil((k + 1) / 3) for a k-parameter space.
  std::optional<std::size_t> init_depth;
  std::optional<std::size_t> fixed_depth;
  double score_threshold = 0.9;
  double beta = 1.0;
  double strategize_beta = 1.0;
  double abort_multiplier = 10.0;
  std::uint64_t seed = 0;
  std::optional<double> time_limit;
  /// BMC step size, passed through to the trajectory header.
  std::optional<long long> step;
  bool no_learn = false;
  bool virtual_clock = false;
  bool revisit_past = false;
  std::optional<std::string> out_path;

  bool operator==(const RunConfig &) const = default;
};

/// Parses run flags (no program name, no subcommand). Throws UsageError.
RunConfig parse_args(const std::vector<std::string> &args);
/// Inverse of parse_args for every field that differs from its default.
std::vector<std::string> render_args(const RunConfig &config);

std::size_t default_init_depth(const StrategySpace &space);

/// Resolves defaults that depend on the space and the backend kind.
EngineConfig make_engine_config(const RunConfig &config,
                                const StrategySpace &space);
std::unique_ptr<Backend> make_backend(const RunConfig &config,
                                      const StrategySpace &space);
TrajectoryHeader make_header(const RunConfig &config, const Backend &backend);

/// Loads everything a config names, runs the engine once and, when
/// out_path is set, writes the trajectory.
struct RunReport {
  RunResult result;
  Summary summary;
};
RunReport run_once(const RunConfig &config);

/// Largest-solved-index over a budget x depth grid, each cell a fresh run
/// with the fixed-depth learner. With repeats > 1 a cell holds the median
/// over seeds seed .. seed + repeats - 1; a run that solves nothing counts
/// as 0.
struct AblationGrid {
  std::vector<double> budgets;
  std::vector<std::size_t> depths;
  /// values[b][d]; NaN where the cell failed.
  std::vector<std::vector<double>> values;
  std::vector<std::vector<std::string>> errors;
};

AblationGrid ablation_grid(const RunConfig &config,
                           const std::vector<double> &budgets,
                           const std::vector<std::size_t> &depths,
                           std::size_t repeats = 1, std::size_t jobs = 1);

/// Tab-separated matrix: a header row of depths, then one row per budget.
void write_grid(const AblationGrid &grid, std::ostream &out);

} // namespace stratlearn
