#pragma once
// Subject-wise leave-one-out evaluation of the topological pipeline.

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "tdagait/descriptors.hpp"
#include "tdagait/forest.hpp"
#include "tdagait/homology.hpp"
#include "tdagait/ingest.hpp"
#include "tdagait/metrics.hpp"

namespace tdagait {

enum class StatePolicy { kOff, kOn, kOffOn };
enum class GridFit { kFold, kAll };

std::string_view to_string(StatePolicy policy);  // "Off", "On", "Off+On"
std::optional<StatePolicy> parse_state_policy(std::string_view text);
std::string_view to_string(GridFit fit);  // "fold", "all"
std::optional<GridFit> parse_grid_fit(std::string_view text);

struct TaskSpec {
  Group positive = Group::kIPD;
  Group negative = Group::kVaP;
  StatePolicy state = StatePolicy::kOff;
  std::vector<Variable> variables{Variable::kMinTC};
  DescriptorParams descriptor{};
  EmbeddingParams embedding{};
  bool standardize = false;
  GridFit grid_fit = GridFit::kFold;

  /// Feature blocks in vector order: state-major (Off block, then On
  /// block), variables in listed order within each state.
  std::vector<VectorBlock> blocks() const;
  /// Throws ConfigError on an invalid combination.
  void validate() const;
};

/// Builds and caches capped persistence diagrams per series, then turns
/// them into descriptor vectors for given grids. Thread-safe.
class Featurizer {
 public:
  Featurizer(const GaitDataset& dataset, const TaskSpec& task);

  /// Capped diagram of one block of one subject. ValidationError naming
  /// the subject if the series is missing.
  const PersistenceDiagram& diagram(const std::string& subject_id, const VectorBlock& block) const;

  /// Grids per block, fitted on `subjects`: grids[block][degree].
  std::vector<std::array<SamplingGrid, 2>> fit_grids(std::span<const std::string> subjects) const;

  DescriptorVector featurize(const std::string& subject_id,
                             std::span<const std::array<SamplingGrid, 2>> grids) const;

  const TaskSpec& task() const { return task_; }

 private:
  const GaitDataset& dataset_;
  TaskSpec task_;
  std::vector<VectorBlock> blocks_;
  mutable std::mutex mutex_;
  mutable std::map<std::tuple<std::string, Variable, State>, PersistenceDiagram> cache_;
};

/// Which subjects each fold used. Recorded so the no-leakage property can
/// be checked from outside.
struct FoldAudit {
  std::string held_out;
  std::vector<std::string> grid_subjects;
  std::vector<std::string> train_subjects;
};

struct EvaluationReport {
  TaskSpec task;
  ForestParams forest;
  std::vector<SubjectResult> per_subject;
  Metrics metrics;
  ConfusionMatrix confusion;
  std::vector<FoldAudit> folds;
};

/// Subjects of the two task groups: positive group first, each sorted.
std::vector<std::string> task_subjects(const GaitDataset& dataset, const TaskSpec& task);

/// One fold per subject: grids fitted on the other subjects (GridFit::kFold),
/// forest trained on the other subjects, held-out subject scored. Folds run
/// on up to `workers` threads; the report does not depend on it.
EvaluationReport loocv(const GaitDataset& dataset, const TaskSpec& task,
                       const ForestParams& forest, std::size_t workers = 1);

/// Throws LeakageError if the held-out subject appears in training (or in
/// grid fitting under GridFit::kFold).
void check_fold(const FoldAudit& fold, GridFit grid_fit);

struct FeatureTable {
  std::vector<std::string> subject_ids;
  std::vector<Group> labels;
  std::vector<std::string> columns;
  FeatureMatrix features;
};

/// Features for every task subject with grids fitted on all of them.
FeatureTable featurize_all(const GaitDataset& dataset, const TaskSpec& task);

}  // namespace tdagait
