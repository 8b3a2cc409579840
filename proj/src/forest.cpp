#include "stratlearn/forest.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

namespace stratlearn {

void Dataset::add(DataPoint p) {
  if (!std::isfinite(p.cost))
    throw std::invalid_argument("dataset: non-finite cost");
  if (points_.empty() && width_ == 0)
    width_ = p.features.size();
  if (p.features.size() != width_)
    throw std::invalid_argument("dataset: feature width " +
                                std::to_string(p.features.size()) +
                                " does not match " + std::to_string(width_));
  points_.push_back(std::move(p));
}

std::size_t RegressionTree::leaf_of(std::span<const double> features) const {
  if (nodes_.empty())
    throw std::logic_error("predict on an empty tree");
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto &n = nodes_[i];
    i = features[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                     : n.right;
  }
  return i;
}

double RegressionTree::predict(std::span<const double> features) const {
  return nodes_[leaf_of(features)].value;
}

std::size_t RegressionTree::depth() const {
  if (nodes_.empty())
    return 0;
  std::size_t best = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (!nodes_[i].is_leaf()) {
      stack.emplace_back(nodes_[i].left, d + 1);
      stack.emplace_back(nodes_[i].right, d + 1);
    }
  }
  return best;
}

namespace {

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double sse = std::numeric_limits<double>::infinity();
};

class TreeBuilder {
public:
  TreeBuilder(const Dataset &data, std::size_t max_depth)
      : data_(data), max_depth_(max_depth) {}

  std::vector<RegressionTree::Node> build(std::vector<std::size_t> rows) {
    grow(rows, 0);
    return std::move(nodes_);
  }

private:
  double cost(std::size_t r) const { return data_[r].cost; }
  double x(std::size_t r, std::size_t f) const { return data_[r].features[f]; }

  std::uint32_t grow(std::span<std::size_t> rows, std::size_t depth) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();

    double sum = 0.0;
    double lo = cost(rows[0]), hi = lo;
    for (auto r : rows) {
      sum += cost(r);
      lo = std::min(lo, cost(r));
      hi = std::max(hi, cost(r));
    }
    const double mean = sum / static_cast<double>(rows.size());
    nodes_[id].value = mean;
    nodes_[id].count = static_cast<std::uint32_t>(rows.size());

    if (depth >= max_depth_ || rows.size() < 2 || lo == hi)
      return id;

    double parent_sse = 0.0;
    for (auto r : rows)
      parent_sse += (cost(r) - mean) * (cost(r) - mean);

    const Split best = find_split(rows, mean);
    // Guard against float noise posing as a gain.
    if (!(best.sse < parent_sse - 1e-12 * std::max(1.0, parent_sse)))
      return id;

    auto mid = std::stable_partition(rows.begin(), rows.end(), [&](auto r) {
      return x(r, best.feature) <= best.threshold;
    });
    const auto n_left = static_cast<std::size_t>(mid - rows.begin());

    const auto left = grow(rows.subspan(0, n_left), depth + 1);
    const auto right = grow(rows.subspan(n_left), depth + 1);
    auto &node = nodes_[id];
    node.feature = static_cast<std::int32_t>(best.feature);
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  // Sweeps each feature in sorted order; costs are centered on the node
  // mean before accumulating to limit cancellation in s2 - s^2/n.
  Split find_split(std::span<const std::size_t> rows, double mean) {
    Split best;
    const std::size_t n = rows.size();
    order_.assign(rows.begin(), rows.end());
    for (std::size_t f = 0; f < data_.width(); ++f) {
      std::stable_sort(order_.begin(), order_.end(),
                       [&](auto a, auto b) { return x(a, f) < x(b, f); });
      double total = 0.0, total2 = 0.0;
      for (auto r : order_) {
        const double y = cost(r) - mean;
        total += y;
        total2 += y * y;
      }
      double s = 0.0, s2 = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double y = cost(order_[i]) - mean;
        s += y;
        s2 += y * y;
        const double xa = x(order_[i], f), xb = x(order_[i + 1], f);
        if (!(xa < xb))
          continue;
        const auto nl = static_cast<double>(i + 1);
        const auto nr = static_cast<double>(n - i - 1);
        const double sr = total - s, sr2 = total2 - s2;
        const double sse =
            std::max(0.0, s2 - s * s / nl) + std::max(0.0, sr2 - sr * sr / nr);
        if (sse < best.sse) {
          best.sse = sse;
          best.feature = f;
          best.threshold = xa + (xb - xa) / 2.0;
        }
      }
    }
    return best;
  }

  const Dataset &data_;
  std::size_t max_depth_;
  std::vector<RegressionTree::Node> nodes_;
  std::vector<std::size_t> order_;
};

} // namespace

RegressionTree fit_tree(const Dataset &data, std::size_t max_depth, Rng &rng,
                        bool bootstrap) {
  if (data.empty())
    throw std::invalid_argument("fit_tree: empty dataset");
  std::vector<std::size_t> rows(data.size());
  if (bootstrap) {
    for (auto &r : rows)
      r = uniform_index(rng, data.size());
  } else {
    std::iota(rows.begin(), rows.end(), 0);
  }
  return RegressionTree(TreeBuilder(data, max_depth).build(std::move(rows)));
}

RandomForest::RandomForest(std::vector<RegressionTree> trees,
                           std::size_t feature_width, std::size_t trained_depth)
    : trees_(std::move(trees)), feature_width_(feature_width),
      trained_depth_(trained_depth) {
  if (trees_.empty())
    throw std::invalid_argument("random forest needs at least one tree");
}

double RandomForest::predict(std::span<const double> features) const {
  if (features.size() != feature_width_)
    throw std::invalid_argument("predict: expected " +
                                std::to_string(feature_width_) +
                                " features, got " +
                                std::to_string(features.size()));
  double sum = 0.0;
  for (const auto &t : trees_)
    sum += t.predict(features);
  return sum / static_cast<double>(trees_.size());
}

RandomForest fit_forest(const Dataset &data, std::size_t n_trees,
                        std::size_t max_depth, std::uint64_t seed,
                        bool bootstrap) {
  if (data.empty())
    throw std::invalid_argument("fit_forest: empty dataset");
  if (n_trees == 0)
    throw std::invalid_argument("fit_forest: need at least one tree");

  std::vector<RegressionTree> trees(n_trees);
  auto fit_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      auto rng = make_rng(seed, "tree", b);
      trees[b] = fit_tree(data, max_depth, rng, bootstrap);
    }
  };

  // Each tree owns its stream, so the split across threads cannot change
  // the result.
  const std::size_t work = n_trees * data.size();
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads =
      work < 20000 ? 1 : std::min<std::size_t>(hw, n_trees);
  if (n_threads <= 1) {
    fit_range(0, n_trees);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_trees + n_threads - 1) / n_threads;
    for (std::size_t b = 0; b < n_trees; b += chunk)
      pool.emplace_back(fit_range, b, std::min(n_trees, b + chunk));
    for (auto &t : pool)
      t.join();
  }

  RandomForest forest(std::move(trees), data.width(), max_depth);
  forest.set_training_score(r2_score(forest, data));
  return forest;
}

double r2_score(std::span<const double> predicted,
                std::span<const double> actual) {
  if (actual.empty())
    throw std::invalid_argument("r2_score: empty dataset");
  if (predicted.size() != actual.size())
    throw std::invalid_argument("r2_score: size mismatch");
  const double mean = std::accumulate(actual.begin(), actual.end(), 0.0) /
                      static_cast<double>(actual.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    ss_tot += (actual[i] - mean) * (actual[i] - mean);
  }
  if (ss_tot == 0.0)
    return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

double r2_score(const RandomForest &forest, const Dataset &data) {
  if (data.empty())
    throw std::invalid_argument("r2_score: empty dataset");
  std::vector<double> predicted, actual;
  predicted.reserve(data.size());
  actual.reserve(data.size());
  for (const auto &p : data.points()) {
    predicted.push_back(forest.predict(p.features));
    actual.push_back(p.cost);
  }
  return r2_score(predicted, actual);
}

RandomForest fit_adaptive(const Dataset &data,
                          const AdaptiveDepthOptions &options) {
  if (data.empty())
    throw std::invalid_argument("fit_adaptive: empty dataset");
  if (options.init_depth < 1)
    throw std::invalid_argument("fit_adaptive: init_depth must be >= 1");
  std::size_t depth = options.init_depth;
  auto forest = fit_forest(data, options.trees, depth, options.seed,
                           options.bootstrap);
  while (forest.training_score() < options.score_threshold &&
         depth < options.depth_cap) {
    ++depth;
    forest = fit_forest(data, options.trees, depth, options.seed,
                        options.bootstrap);
  }
  return forest;
}

void RandomForest::write(std::ostream &out) const {
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::setprecision(17);
  out << "forest " << trees_.size() << ' ' << feature_width_ << ' '
      << trained_depth_ << ' ' << training_score_ << '\n';
  for (const auto &t : trees_) {
    out << "tree " << t.nodes().size() << '\n';
    for (const auto &n : t.nodes()) {
      if (n.is_leaf())
        out << "leaf " << n.value << ' ' << n.count << '\n';
      else
        out << "split " << n.feature << ' ' << n.threshold << ' ' << n.left
            << ' ' << n.right << ' ' << n.value << ' ' << n.count << '\n';
    }
  }
  out.flags(old_flags);
  out.precision(old_precision);
}

RandomForest RandomForest::read(std::istream &in) {
  auto fail = [](const std::string &what) -> RandomForest {
    throw std::runtime_error("forest dump: " + what);
  };
  std::string tag;
  std::size_t n_trees = 0, width = 0, depth = 0;
  double score = 0.0;
  if (!(in >> tag >> n_trees >> width >> depth >> score) || tag != "forest")
    return fail("bad header");
  std::vector<RegressionTree> trees;
  for (std::size_t t = 0; t < n_trees; ++t) {
    std::size_t n_nodes = 0;
    if (!(in >> tag >> n_nodes) || tag != "tree")
      return fail("bad tree header");
    std::vector<RegressionTree::Node> nodes(n_nodes);
    for (auto &n : nodes) {
      if (!(in >> tag))
        return fail("truncated tree");
      if (tag == "leaf") {
        in >> n.value >> n.count;
      } else if (tag == "split") {
        in >> n.feature >> n.threshold >> n.left >> n.right >> n.value >>
            n.count;
        if (n.left >= n_nodes || n.right >= n_nodes)
          return fail("child index out of range");
      } else {
        return fail("unknown node tag '" + tag + "'");
      }
      if (!in)
        return fail("bad node line");
    }
    trees.emplace_back(std::move(nodes));
  }
  RandomForest forest(std::move(trees), width, depth);
  forest.set_training_score(score);
  return forest;
}

} // namespace stratlearn
