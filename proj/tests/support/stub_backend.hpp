#pragma once

#include "stratlearn/backend.hpp"
#include "stratlearn/strategy_space.hpp"

#include <functional>
#include <string>
#include <vector>

namespace stratlearn::testing {

/// Backend driven by a fixed verdict list and an effort function.
class ScriptedBackend final : public Backend {
public:
  using Effort = std::function<double(std::size_t, const Strategy &)>;

  ScriptedBackend(std::vector<Verdict> verdicts, Effort effort)
      : verdicts_(std::move(verdicts)), effort_(std::move(effort)) {}

  /// Verdict pattern from a string of 'S' and 'U'.
  static std::vector<Verdict> pattern(const std::string &su) {
    std::vector<Verdict> v;
    for (char c : su)
      v.push_back(c == 'S' ? Verdict::sat : Verdict::unsat);
    return v;
  }

  std::size_t problem_count() const override { return verdicts_.size(); }

  SolveOutcome evaluate(std::size_t index, const Strategy &strategy,
                        std::optional<double> budget) override {
    ++calls;
    const double m = effort_(index, strategy);
    if (budget && m > *budget)
      return {Verdict::aborted, m, std::nullopt};
    return {verdicts_.at(index - 1), m, std::nullopt};
  }

  std::size_t calls = 0;

private:
  std::vector<Verdict> verdicts_;
  Effort effort_;
};

inline StrategySpace binary_space(std::size_t k) {
  std::vector<ParameterDomain> d;
  for (std::size_t j = 0; j < k; ++j)
    d.push_back({"p" + std::to_string(j), "0", {"1"}});
  return StrategySpace(std::move(d));
}

} // namespace stratlearn::testing
