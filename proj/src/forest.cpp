#include "tdagait/forest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>

#include "tdagait/error.hpp"
#include "tdagait/parallel.hpp"

namespace tdagait {

void FeatureMatrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw Error(ErrorCode::kDimensionMismatch, "row has " + std::to_string(values.size()) +
                                                   " features, matrix has " + std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

std::size_t MaxFeatures::resolve(std::size_t feature_count) const {
  switch (rule) {
    case Rule::kAll: return feature_count;
    case Rule::kFixed:
      if (k == 0 || k > feature_count) {
        throw Error(ErrorCode::kConfig, "max_features " + std::to_string(k) +
                                            " outside [1, " + std::to_string(feature_count) + "]");
      }
      return k;
    case Rule::kSqrt: break;
  }
  const auto root = static_cast<std::size_t>(std::sqrt(static_cast<double>(feature_count)));
  return std::max<std::size_t>(1, root);
}

std::string MaxFeatures::describe() const {
  switch (rule) {
    case Rule::kSqrt: return "sqrt";
    case Rule::kAll: return "all";
    case Rule::kFixed: return std::to_string(k);
  }
  return "sqrt";
}

std::optional<MaxFeatures> MaxFeatures::parse(const std::string& text) {
  if (text == "sqrt") return MaxFeatures{};
  if (text == "all") return MaxFeatures{Rule::kAll, 0};
  std::size_t k = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
  if (ec != std::errc() || ptr != text.data() + text.size() || k == 0) return std::nullopt;
  return MaxFeatures{Rule::kFixed, k};
}

std::uint64_t tree_stream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double score = -1.0;  // sum over children of (pos^2 + neg^2) / size; higher is purer
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, std::span<const std::uint8_t> labels, const ForestParams& params,
              std::size_t mtry, std::uint64_t stream_seed)
      : x_(x), labels_(labels), params_(params), mtry_(mtry), rng_(stream_seed) {}

  RandomForest::Tree build() {
    const std::size_t n = x_.rows();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = pick(rng_);
    features_.resize(x_.cols());
    std::iota(features_.begin(), features_.end(), std::size_t{0});
    grow(sample, 0);
    return std::move(tree_);
  }

 private:
  std::uint32_t grow(std::vector<std::size_t>& sample, std::size_t depth) {
    const auto id = static_cast<std::uint32_t>(tree_.size());
    tree_.emplace_back();
    std::uint32_t pos = 0;
    for (std::size_t s : sample) pos += labels_[s] != 0 ? 1U : 0U;
    const auto neg = static_cast<std::uint32_t>(sample.size()) - pos;
    tree_[id].positive = pos;
    tree_[id].negative = neg;

    const bool pure = pos == 0 || neg == 0;
    const bool too_small = sample.size() < 2 * params_.min_samples_leaf;
    const bool too_deep = params_.max_depth && depth >= *params_.max_depth;
    if (pure || too_small || too_deep) return id;

    const auto split = best_split(sample);
    if (!split) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t s : sample) {
      (x_(s, split->feature) <= split->threshold ? left : right).push_back(s);
    }
    sample.clear();
    sample.shrink_to_fit();
    tree_[id].feature = static_cast<std::int32_t>(split->feature);
    tree_[id].threshold = split->threshold;
    tree_[id].positive = 0;
    tree_[id].negative = 0;
    const std::uint32_t l = grow(left, depth + 1);
    const std::uint32_t r = grow(right, depth + 1);
    tree_[id].left = l;
    tree_[id].right = r;
    return id;
  }

  // Draws features without replacement; keeps drawing past mtry while no
  // candidate has produced a valid split (constant features).
  std::optional<Split> best_split(const std::vector<std::size_t>& sample) {
    std::optional<Split> best;
    const std::size_t total = features_.size();
    std::vector<std::pair<double, std::uint8_t>> column(sample.size());
    for (std::size_t drawn = 0; drawn < total; ++drawn) {
      if (drawn >= mtry_ && best) break;
      std::uniform_int_distribution<std::size_t> pick(drawn, total - 1);
      std::swap(features_[drawn], features_[pick(rng_)]);
      const std::size_t f = features_[drawn];
      for (std::size_t i = 0; i < sample.size(); ++i) {
        column[i] = {x_(sample[i], f), labels_[sample[i]]};
      }
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      const double n = static_cast<double>(column.size());
      double total_pos = 0.0;
      for (const auto& c : column) total_pos += c.second != 0 ? 1.0 : 0.0;
      double left_pos = 0.0;
      const std::size_t leaf = params_.min_samples_leaf;
      for (std::size_t i = 1; i < column.size(); ++i) {
        left_pos += column[i - 1].second != 0 ? 1.0 : 0.0;
        if (i < leaf || column.size() - i < leaf) continue;
        if (!(column[i - 1].first < column[i].first)) continue;
        const double nl = static_cast<double>(i);
        const double nr = n - nl;
        const double right_pos = total_pos - left_pos;
        const double score = (left_pos * left_pos + (nl - left_pos) * (nl - left_pos)) / nl +
                             (right_pos * right_pos + (nr - right_pos) * (nr - right_pos)) / nr;
        if (!best || score > best->score) {
          const double a = column[i - 1].first;
          const double b = column[i].first;
          double mid = a + (b - a) / 2.0;
          if (!(mid < b)) mid = a;
          best = Split{f, mid, score};
        }
      }
    }
    return best;
  }

  const FeatureMatrix& x_;
  std::span<const std::uint8_t> labels_;
  const ForestParams& params_;
  std::size_t mtry_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> features_;
  RandomForest::Tree tree_;
};

}  // namespace

RandomForest RandomForest::train(const FeatureMatrix& x, std::span<const std::uint8_t> labels,
                                 const ForestParams& params) {
  if (x.rows() == 0 || x.cols() == 0) throw Error(ErrorCode::kEmptyFeatures, "no training data");
  if (labels.size() != x.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "label count differs from row count");
  }
  if (params.n_trees == 0) throw Error(ErrorCode::kConfig, "n_trees must be >= 1");
  if (params.min_samples_leaf == 0) throw Error(ErrorCode::kConfig, "min_samples_leaf must be >= 1");
  if (params.max_depth && *params.max_depth == 0) {
    throw Error(ErrorCode::kConfig, "max_depth must be >= 1");
  }
  const auto positives = std::count_if(labels.begin(), labels.end(),
                                       [](std::uint8_t l) { return l != 0; });
  if (positives == 0 || positives == static_cast<long>(labels.size())) {
    throw Error(ErrorCode::kDegenerateLabels, "training labels contain a single class");
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (double v : x.row(r)) {
      if (std::isnan(v)) throw Error(ErrorCode::kValidation, "NaN in feature matrix");
    }
  }
  const std::size_t mtry = params.max_features.resolve(x.cols());

  RandomForest model;
  model.feature_count_ = x.cols();
  model.trees_.resize(params.n_trees);
  parallel_for(params.n_trees, params.workers, [&](std::size_t t) {
    TreeBuilder builder(x, labels, params, mtry, tree_stream_seed(params.seed, t));
    model.trees_[t] = builder.build();
  });
  return model;
}

RandomForest RandomForest::from_trees(std::vector<Tree> trees, std::size_t feature_count) {
  if (trees.empty()) throw Error(ErrorCode::kConfig, "forest needs at least one tree");
  RandomForest model;
  model.trees_ = std::move(trees);
  model.feature_count_ = feature_count;
  return model;
}

double RandomForest::predict_score(std::span<const double> features) const {
  if (features.size() != feature_count_) {
    throw Error(ErrorCode::kDimensionMismatch, "expected " + std::to_string(feature_count_) +
                                                   " features, got " +
                                                   std::to_string(features.size()));
  }
  double sum = 0.0;
  for (const Tree& tree : trees_) {
    std::uint32_t node = 0;
    while (tree[node].feature >= 0) {
      const auto f = static_cast<std::size_t>(tree[node].feature);
      node = features[f] <= tree[node].threshold ? tree[node].left : tree[node].right;
    }
    const double total = tree[node].positive + tree[node].negative;
    sum += total > 0.0 ? tree[node].positive / total : 0.0;
  }
  return sum / static_cast<double>(trees_.size());
}

}  // namespace tdagait
