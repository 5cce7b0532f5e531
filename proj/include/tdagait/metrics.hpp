#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "tdagait/ingest.hpp"

namespace tdagait {

/// Positive class is the first group of the task.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fn + fp + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct Metrics {
  double accuracy = 0.0;
  std::optional<double> sensitivity;  // absent without positive subjects
  std::optional<double> specificity;  // absent without negative subjects
  std::optional<double> auc;          // absent unless both classes are present

  bool operator==(const Metrics&) const = default;
};

struct SubjectResult {
  std::string subject_id;
  Group truth = Group::kCO;
  Group predicted = Group::kCO;
  double score = 0.0;  // positive-class score

  bool operator==(const SubjectResult&) const = default;
};

/// Accuracy, sensitivity and specificity of a confusion matrix.
Metrics metrics_from_confusion(const ConfusionMatrix& cm);

/// Mann-Whitney AUC with midranks for ties. nullopt if either side is empty.
std::optional<double> rank_auc(std::span<const double> positive_scores,
                               std::span<const double> negative_scores);

struct MetricsReport {
  Metrics metrics;
  ConfusionMatrix confusion;
};

/// Metrics over per-subject rows; `positive` names the positive class.
MetricsReport compute_metrics(std::span<const SubjectResult> rows, Group positive);

}  // namespace tdagait
