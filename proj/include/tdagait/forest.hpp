#pragma once
// Binary random forest: bootstrap resampling, Gini splits, seeded per tree.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tdagait {

/// Row-major dense feature matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }
  void append_row(std::span<const double> values);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct MaxFeatures {
  enum class Rule { kSqrt, kAll, kFixed } rule = Rule::kSqrt;
  std::size_t k = 0;  // used by kFixed

  std::size_t resolve(std::size_t feature_count) const;
  std::string describe() const;  // "sqrt", "all" or the number
  static std::optional<MaxFeatures> parse(const std::string& text);
};

struct ForestParams {
  std::size_t n_trees = 500;
  MaxFeatures max_features{};
  std::size_t min_samples_leaf = 1;
  std::optional<std::size_t> max_depth{};
  std::uint64_t seed = 0;
  /// Threads used for tree construction. Does not affect results.
  std::size_t workers = 1;
};

class RandomForest {
 public:
  struct Node {
    // Internal: feature >= 0, children indices. Leaf: feature = -1.
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t positive = 0;  // class counts of bootstrap samples in the leaf
    std::uint32_t negative = 0;
  };
  using Tree = std::vector<Node>;

  /// `labels[i]` is 1 for the positive class and 0 for the negative one.
  static RandomForest train(const FeatureMatrix& x, std::span<const std::uint8_t> labels,
                            const ForestParams& params);

  /// Assembles a model from prebuilt trees.
  static RandomForest from_trees(std::vector<Tree> trees, std::size_t feature_count);

  /// Mean over trees of the positive-class frequency in the reached leaf.
  double predict_score(std::span<const double> features) const;
  /// Positive when score >= 0.5.
  bool predict(std::span<const double> features) const { return predict_score(features) >= 0.5; }

  std::size_t feature_count() const { return feature_count_; }
  const std::vector<Tree>& trees() const { return trees_; }

 private:
  std::vector<Tree> trees_;
  std::size_t feature_count_ = 0;
};

/// Stream seed for tree `index`: splitmix64 finalizer over (seed, index).
std::uint64_t tree_stream_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace tdagait
