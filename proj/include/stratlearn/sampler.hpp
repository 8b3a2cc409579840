#pragma once

#include "stratlearn/rng.hpp"
#include "stratlearn/strategy_space.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace stratlearn {

struct SamplerConfig {
  /// Inverse temperature; larger values make uphill moves rarer.
  double beta = 1.0;
  std::uint64_t seed = 0;
  /// Proposals change exactly this many parameters.
  std::size_t k_diff = 1;

  void validate() const;
};

/// State of the chain after one step. `accepted` tells whether the step's
/// proposal was taken; the first record (the start state) is always
/// marked accepted.
struct ChainRecord {
  Strategy strategy;
  double cost = 0.0;
  bool accepted = true;
};

/// A cost function failed while the chain was evaluating `strategy`. The
/// original exception is nested.
class ChainError : public std::runtime_error {
public:
  ChainError(const std::string &msg, Strategy strategy)
      : std::runtime_error(msg), strategy_(std::move(strategy)) {}
  const Strategy &strategy() const { return strategy_; }

private:
  Strategy strategy_;
};

using CostFunction = std::function<double(const Strategy &)>;
using ChainObserver = std::function<void(const ChainRecord &)>;

/// min(1, exp(beta * (cost - cost_new))).
double acceptance_probability(double cost, double cost_new, double beta);

/// Uniform draw over the strategies at Hamming distance k_diff from current.
Strategy propose(const StrategySpace &space, const Strategy &current, Rng &rng,
                 std::size_t k_diff = 1);

/// Metropolis-Hastings walk of n_samples states starting at `start`
/// (record 0). Costs are evaluated once per step; callers that want
/// memoization wrap cost_fn. `observer` sees each record as it is appended,
/// so a failing chain still reports its prefix.
std::vector<ChainRecord> run_chain(const StrategySpace &space,
                                   const CostFunction &cost_fn,
                                   const Strategy &start,
                                   std::size_t n_samples,
                                   const SamplerConfig &config,
                                   const ChainObserver &observer = {});

} // namespace stratlearn
