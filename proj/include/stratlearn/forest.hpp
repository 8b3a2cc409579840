#pragma once

#include "stratlearn/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace stratlearn {

/// Encoded features (parameter codes then problem index) and observed cost.
struct DataPoint {
  std::vector<double> features;
  double cost = 0.0;
};

/// Append-only training set with a fixed feature width.
class Dataset {
public:
  Dataset() = default;
  explicit Dataset(std::size_t width) : width_(width) {}

  /// The first point fixes the width when the dataset was default built.
  void add(DataPoint p);

  std::size_t width() const { return width_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<DataPoint> &points() const { return points_; }
  const DataPoint &operator[](std::size_t i) const { return points_[i]; }

private:
  std::size_t width_ = 0;
  std::vector<DataPoint> points_;
};

/// Binary regression tree. Branch nodes send x[feature] <= threshold left.
class RegressionTree {
public:
  struct Node {
    std::int32_t feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    double value = 0.0;      // mean training cost of the node
    std::uint32_t count = 0; // training points routed here
    bool is_leaf() const { return feature < 0; }
  };

  RegressionTree() = default;
  explicit RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  double predict(std::span<const double> features) const;
  /// Index of the leaf the features are routed to.
  std::size_t leaf_of(std::span<const double> features) const;
  std::size_t depth() const;
  const std::vector<Node> &nodes() const { return nodes_; }

private:
  std::vector<Node> nodes_;
};

/// Greedy variance-reduction tree. Splits stop at max_depth, at pure nodes,
/// at nodes with fewer than two points, or when no threshold lowers the
/// summed squared error. With bootstrap the tree is fit on |data| draws
/// with replacement.
RegressionTree fit_tree(const Dataset &data, std::size_t max_depth, Rng &rng,
                        bool bootstrap);

class RandomForest {
public:
  RandomForest() = default;
  RandomForest(std::vector<RegressionTree> trees, std::size_t feature_width,
               std::size_t trained_depth);

  /// Mean of the per-tree predictions.
  double predict(std::span<const double> features) const;

  const std::vector<RegressionTree> &trees() const { return trees_; }
  std::size_t feature_width() const { return feature_width_; }
  std::size_t trained_depth() const { return trained_depth_; }
  double training_score() const { return training_score_; }
  void set_training_score(double s) { training_score_ = s; }

  /// Line-oriented text form, one node per line.
  void write(std::ostream &out) const;
  static RandomForest read(std::istream &in);

private:
  std::vector<RegressionTree> trees_;
  std::size_t feature_width_ = 0;
  std::size_t trained_depth_ = 0;
  double training_score_ = 0.0;
};

/// B trees on independent resamples; tree b draws from the stream
/// derive_seed(seed, "tree", b). training_score is the R^2 on `data`.
RandomForest fit_forest(const Dataset &data, std::size_t trees,
                        std::size_t max_depth, std::uint64_t seed,
                        bool bootstrap = true);

/// 1 - SS_res / SS_tot. When SS_tot is zero: 1 if SS_res is zero, else 0.
double r2_score(std::span<const double> predicted,
                std::span<const double> actual);
double r2_score(const RandomForest &forest, const Dataset &data);

struct AdaptiveDepthOptions {
  std::size_t trees = 50;
  std::size_t init_depth = 1;
  double score_threshold = 0.9;
  std::size_t depth_cap = 1;
  std::uint64_t seed = 0;
  bool bootstrap = true;
};

/// Fits at init_depth and refits one level deeper while the training score
/// stays below the threshold and the depth cap allows.
RandomForest fit_adaptive(const Dataset &data,
                          const AdaptiveDepthOptions &options);

} // namespace stratlearn
