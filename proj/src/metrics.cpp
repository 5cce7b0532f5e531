#include "tdagait/metrics.hpp"

#include <algorithm>
#include <vector>

namespace tdagait {

Metrics metrics_from_confusion(const ConfusionMatrix& cm) {
  Metrics m;
  const auto ratio = [](std::size_t num, std::size_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = cm.total() == 0 ? 0.0 : ratio(cm.tp + cm.tn, cm.total());
  if (cm.tp + cm.fn > 0) m.sensitivity = ratio(cm.tp, cm.tp + cm.fn);
  if (cm.tn + cm.fp > 0) m.specificity = ratio(cm.tn, cm.tn + cm.fp);
  return m;
}

std::optional<double> rank_auc(std::span<const double> positive_scores,
                               std::span<const double> negative_scores) {
  if (positive_scores.empty() || negative_scores.empty()) return std::nullopt;
  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all;
  all.reserve(positive_scores.size() + negative_scores.size());
  for (double s : positive_scores) all.push_back({s, true});
  for (double s : negative_scores) all.push_back({s, false});
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.score < b.score; });

  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].positive) positive_rank_sum += midrank;
    }
    i = j;
  }
  const double np = static_cast<double>(positive_scores.size());
  const double nn = static_cast<double>(negative_scores.size());
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

MetricsReport compute_metrics(std::span<const SubjectResult> rows, Group positive) {
  MetricsReport out;
  std::vector<double> pos_scores, neg_scores;
  for (const auto& r : rows) {
    const bool truth = r.truth == positive;
    const bool called = r.predicted == positive;
    if (truth) {
      pos_scores.push_back(r.score);
      ++(called ? out.confusion.tp : out.confusion.fn);
    } else {
      neg_scores.push_back(r.score);
      ++(called ? out.confusion.fp : out.confusion.tn);
    }
  }
  out.metrics = metrics_from_confusion(out.confusion);
  out.metrics.auc = rank_auc(pos_scores, neg_scores);
  return out;
}

}  // namespace tdagait
