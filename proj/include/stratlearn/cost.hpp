#pragma once

#include "stratlearn/backend.hpp"

#include <string_view>

namespace stratlearn {

enum class MetricKind { conflicts, virtual_time };

std::string_view to_string(MetricKind k);

struct CostConfig {
  MetricKind metric_kind = MetricKind::conflicts;
  /// Collect runs are stopped at this multiple of the baseline metric and
  /// recorded at this cost.
  double abort_multiplier = 10.0;

  void validate() const;
};

struct CostRecord {
  Strategy strategy;
  std::size_t index = 0;
  double raw_metric = 0.0;
  double baseline_metric = 1.0;
  double cost = 0.0;
  bool aborted = false;
  /// Effort actually spent by the backend call.
  double effort = 0.0;
  std::optional<double> wall_time;
};

/// raw / baseline. Throws for a nonpositive baseline.
double normalize(double raw, double baseline);

/// One Collect evaluation: runs `strategy` on problem `index` with a budget
/// of abort_multiplier * baseline. The verdict is not used.
CostRecord collect_cost(Backend &backend, std::size_t index,
                        const Strategy &strategy, double baseline_metric,
                        const CostConfig &config);

} // namespace stratlearn
