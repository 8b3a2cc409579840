#include "stratlearn/cost.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace stratlearn {

std::string_view to_string(MetricKind k) {
  return k == MetricKind::conflicts ? "conflicts" : "virtual_time";
}

void CostConfig::validate() const {
  if (!(abort_multiplier > 1.0) || !std::isfinite(abort_multiplier))
    throw std::invalid_argument("abort multiplier must be finite and > 1");
}

double normalize(double raw, double baseline) {
  if (!(baseline > 0.0) || !std::isfinite(baseline))
    throw std::invalid_argument("baseline metric must be positive, got " +
                                std::to_string(baseline));
  if (!(raw >= 0.0) || !std::isfinite(raw))
    throw std::invalid_argument("raw metric must be nonnegative and finite");
  return raw / baseline;
}

CostRecord collect_cost(Backend &backend, std::size_t index,
                        const Strategy &strategy, double baseline_metric,
                        const CostConfig &config) {
  config.validate();
  if (!(baseline_metric > 0.0))
    throw std::invalid_argument("baseline metric must be positive");
  const double budget = config.abort_multiplier * baseline_metric;
  const auto outcome = backend.evaluate(index, strategy, budget);

  CostRecord r;
  r.strategy = strategy;
  r.index = index;
  r.baseline_metric = baseline_metric;
  r.raw_metric = outcome.metric;
  r.effort = charged_effort(outcome, budget);
  r.wall_time = outcome.wall_time;
  r.aborted =
      outcome.verdict == Verdict::aborted || outcome.metric > budget;
  r.cost = r.aborted ? config.abort_multiplier
                     : normalize(outcome.metric, baseline_metric);
  return r;
}

} // namespace stratlearn
