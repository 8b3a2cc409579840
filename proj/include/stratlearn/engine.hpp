#pragma once

#include "stratlearn/backend.hpp"
#include "stratlearn/cost.hpp"
#include "stratlearn/forest.hpp"
#include "stratlearn/sampler.hpp"
#include "stratlearn/strategy_space.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stratlearn {

enum class Terminal { success, failure };
enum class Outcome { success, failure, time_limit };
enum class Phase { solve, collect, train, strategize };
enum class ClockMode { virtual_clock, wall_clock };

std::string_view to_string(Outcome o);
std::optional<Outcome> parse_outcome(std::string_view s);
std::string_view to_string(Phase p);
std::optional<Phase> parse_phase(std::string_view s);

/// A rule was applied outside its premise.
class RuleNotApplicable : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Backend or provider failure during a run, with the rule and index that
/// triggered it in the message. The original exception is nested.
class EngineError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Configuration <i, v, D, M> plus bookkeeping.
struct EngineState {
  std::size_t index = 1;
  Strategy strategy;
  Dataset dataset;
  std::optional<RandomForest> oracle;
  double learning_time_spent = 0.0;
  std::optional<Terminal> terminal;
  std::size_t epochs = 0;
  /// Baseline metric per solved index, from the in-force strategy.
  std::map<std::size_t, double> baselines;
};

struct EpochPolicy {
  std::size_t samples_per_epoch = 100;  // N
  double learning_budget = 0.0;         // T, in clock units
  std::size_t strategize_samples = 500; // S

  void validate() const;
};

struct LearnerConfig {
  std::size_t trees = 50;
  std::size_t init_depth = 1;
  double score_threshold = 0.9;
  /// Defaults to the feature width (parameters + 1).
  std::optional<std::size_t> depth_cap;
  /// When set, every Train uses exactly this depth.
  std::optional<std::size_t> fixed_depth;
  bool bootstrap = true;
};

struct EngineConfig {
  EpochPolicy policy;
  /// beta and k_diff are used; seeds are derived from `seed`.
  SamplerConfig collect_sampler;
  SamplerConfig strategize_sampler;
  LearnerConfig learner;
  CostConfig cost;
  std::uint64_t seed = 0;
  /// Total clock units available to solving and learning.
  std::optional<double> time_limit;
  ClockMode clock = ClockMode::virtual_clock;
  /// Collect on a uniformly drawn solved index instead of the current one.
  bool revisit_past_indices = false;
  /// Baselines below this are raised to it so costs stay defined.
  double baseline_floor = 1.0;
  std::optional<Strategy> initial_strategy;
};

struct Event {
  Phase phase = Phase::solve;
  std::size_t index = 0;
  std::string strategy; // rendered name=value list
  std::optional<Verdict> verdict;
  double raw_metric = 0.0;
  /// collect: normalized cost; strategize: predicted cost.
  std::optional<double> cost;
  double virtual_time = 0.0;
  double cumulative_time = 0.0;
  bool aborted = false;
  std::optional<double> training_score;
  std::optional<std::size_t> trained_depth;

  bool operator==(const Event &) const = default;
};

class Trajectory {
public:
  /// Appends `e`, stamping cumulative_time as the running sum.
  void record(Event e);
  const std::vector<Event> &events() const { return events_; }
  double cumulative_time() const { return cumulative_; }

private:
  std::vector<Event> events_;
  double cumulative_ = 0.0;
};

struct RunResult {
  Outcome outcome = Outcome::failure;
  std::optional<std::size_t> largest_solved_index;
  std::size_t problem_count = 0;
  Trajectory trajectory;
  EngineState state;
  std::size_t rule_applications = 0;
  std::vector<std::string> log;
};

// Base calculus. Each throws RuleNotApplicable when its premise fails.
EngineState rule_next(EngineState state, std::size_t problem_count,
                      Verdict verdict);
EngineState rule_success(EngineState state, Verdict verdict);
EngineState rule_failure(EngineState state, std::size_t problem_count,
                         Verdict verdict);

/// learning_time_spent + N * t_current <= T; never with T <= 0.
bool should_learn(const EngineState &state, const EpochPolicy &policy,
                  double t_current);

/// Upper bound on rule applications of a run.
std::size_t rule_application_ceiling(std::size_t problem_count,
                                     std::size_t epochs,
                                     std::size_t samples_per_epoch);

class Engine {
public:
  Engine(const StrategySpace &space, Backend &backend, EngineConfig config);

  EngineState initial_state() const;

  /// Eval of the current problem under the current strategy, recorded as a
  /// solve event. Returns the outcome with its charged time.
  SolveOutcome solve_current(EngineState &state);

  /// N Collect applications on the current index followed by Train.
  /// Refused (returns false, logs a line) when the budget check fails.
  /// Works in place so points collected before a backend failure stay in
  /// the state.
  bool learning_epoch(EngineState &state, double t_current);

  /// Replaces the strategy with the lowest predicted-cost state of an
  /// S-step chain over the oracle at the current index.
  EngineState rule_strategize(EngineState state);

  RunResult run();

  const Trajectory &trajectory() const { return trajectory_; }
  const std::vector<std::string> &log() const { return log_; }
  std::size_t rule_applications() const { return rule_applications_; }

private:
  struct TimeLimitReached {};

  double remaining() const;
  void record(Event e);
  RandomForest train(const Dataset &data, std::size_t epoch) const;

  const StrategySpace &space_;
  Backend &backend_;
  EngineConfig config_;
  Trajectory trajectory_;
  std::vector<std::string> log_;
  std::size_t rule_applications_ = 0;
};

} // namespace stratlearn
