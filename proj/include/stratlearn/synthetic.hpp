#pragma once

#include "stratlearn/backend.hpp"

#include <filesystem>
#include <map>
#include <vector>

namespace stratlearn {

/// Deterministic stand-in for a family of related solver queries. For
/// problem i and strategy v the effort is
///
///   base_metric(i) * (1 + sum_j weight_j * [v_j != optimum_j(i)])
///
/// where optimum(i) is the hidden optimum, replaced from each drift index
/// onward when drift entries are present.
struct SyntheticLandscape {
  Strategy hidden_optimum;
  std::vector<double> base_metric; // entry i-1 belongs to problem i
  std::vector<double> weights;     // one per parameter, >= 0
  std::map<std::size_t, Strategy> drift;
  std::vector<Verdict> verdicts; // SAT or UNSAT per problem

  std::size_t problem_count() const { return verdicts.size(); }
  const Strategy &optimum_at(std::size_t index) const;
  /// Effort without any budget applied.
  double metric(std::size_t index, const Strategy &v) const;
  void validate(const StrategySpace &space) const;
};

/// Key-value landscape description:
///
///   problems = 30               # or: verdicts = UUUUS
///   sat_index = 12              # optional first (and only) SAT problem
///   base_metric = 1000          # with growth: base * growth^(i-1)
///   growth = 1.1                # or: base_metrics = 10,20,30
///   optimum = chrono=0,tier2=9  # unnamed parameters keep defaults
///   default_weight = 0.5
///   weights = chrono=1.0        # per-parameter overrides
///   drift = 11:chrono=1;21:phase=0
SyntheticLandscape parse_landscape(std::string_view text,
                                   const StrategySpace &space);
SyntheticLandscape load_landscape(const std::filesystem::path &path,
                                  const StrategySpace &space);

/// Pure function of its arguments; ABORTED (carrying the full metric) when
/// the metric exceeds the budget.
SolveOutcome evaluate_synthetic(const SyntheticLandscape &landscape,
                                std::size_t index, const Strategy &strategy,
                                std::optional<double> budget);

class SyntheticBackend final : public Backend {
public:
  explicit SyntheticBackend(SyntheticLandscape landscape)
      : landscape_(std::move(landscape)) {}

  std::size_t problem_count() const override {
    return landscape_.problem_count();
  }
  SolveOutcome evaluate(std::size_t index, const Strategy &strategy,
                        std::optional<double> budget) override {
    return evaluate_synthetic(landscape_, index, strategy, budget);
  }
  bool allows_concurrent_calls() const override { return true; }

  const SyntheticLandscape &landscape() const { return landscape_; }

private:
  SyntheticLandscape landscape_;
};

} // namespace stratlearn
