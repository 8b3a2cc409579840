#pragma once

#include "stratlearn/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace stratlearn::testing {

inline double sse(const std::vector<double> &ys) {
  if (ys.empty())
    return 0.0;
  double mean = 0;
  for (double y : ys)
    mean += y;
  mean /= ys.size();
  double s = 0;
  for (double y : ys)
    s += (y - mean) * (y - mean);
  return s;
}

/// Children SSE of splitting `data` at features[f] <= t, computed directly.
inline double split_sse(const Dataset &data, std::size_t f, double t) {
  std::vector<double> l, r;
  for (const auto &p : data.points())
    (p.features[f] <= t ? l : r).push_back(p.cost);
  return sse(l) + sse(r);
}

struct SplitCandidate {
  std::size_t feature;
  double threshold;
  double sse;
};

/// Every midpoint split of every feature.
inline std::vector<SplitCandidate> all_splits(const Dataset &data) {
  std::vector<SplitCandidate> out;
  for (std::size_t f = 0; f < data.width(); ++f) {
    std::vector<double> xs;
    for (const auto &p : data.points())
      xs.push_back(p.features[f]);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const double t = (xs[i] + xs[i + 1]) / 2;
      out.push_back({f, t, split_sse(data, f, t)});
    }
  }
  return out;
}

} // namespace stratlearn::testing
