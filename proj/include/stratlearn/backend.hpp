#pragma once

#include "stratlearn/strategy_space.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stratlearn {

enum class Verdict { sat, unsat, aborted };

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view s);

/// Result of one Eval call. `metric` is the deterministic effort measure
/// (conflicts, or a synthetic quantity); for ABORTED it is the metric
/// observed when the run stopped.
struct SolveOutcome {
  Verdict verdict = Verdict::unsat;
  double metric = 0.0;
  std::optional<double> wall_time;
};

/// Effort charged for an outcome when a budget was in force: an aborted run
/// cannot have spent more than its budget.
double charged_effort(const SolveOutcome &outcome,
                      std::optional<double> budget);

class BackendError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Eval: (problem index, strategy) -> verdict and effort. Problem indices are
/// 1-based and contiguous.
class Backend {
public:
  virtual ~Backend() = default;

  virtual std::size_t problem_count() const = 0;

  /// `budget`, when set, caps the metric; runs that exceed it come back as
  /// ABORTED.
  virtual SolveOutcome evaluate(std::size_t index, const Strategy &strategy,
                                std::optional<double> budget) = 0;

  virtual bool allows_concurrent_calls() const { return false; }
};

} // namespace stratlearn
