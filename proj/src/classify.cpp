#include "tdagait/classify.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "tdagait/error.hpp"
#include "tdagait/parallel.hpp"

namespace tdagait {

std::string_view to_string(StatePolicy policy) {
  switch (policy) {
    case StatePolicy::kOff: return "Off";
    case StatePolicy::kOn: return "On";
    case StatePolicy::kOffOn: return "Off+On";
  }
  return "?";
}

std::optional<StatePolicy> parse_state_policy(std::string_view text) {
  std::string lower(text);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "off") return StatePolicy::kOff;
  if (lower == "on") return StatePolicy::kOn;
  if (lower == "off+on" || lower == "offon") return StatePolicy::kOffOn;
  return std::nullopt;
}

std::string_view to_string(GridFit fit) { return fit == GridFit::kFold ? "fold" : "all"; }

std::optional<GridFit> parse_grid_fit(std::string_view text) {
  if (text == "fold") return GridFit::kFold;
  if (text == "all") return GridFit::kAll;
  return std::nullopt;
}

std::vector<VectorBlock> TaskSpec::blocks() const {
  std::vector<State> states;
  switch (state) {
    case StatePolicy::kOff: states = {State::kOff}; break;
    case StatePolicy::kOn: states = {State::kOn}; break;
    case StatePolicy::kOffOn: states = {State::kOff, State::kOn}; break;
  }
  std::vector<VectorBlock> out;
  for (State s : states) {
    for (Variable v : variables) out.push_back({v, s});
  }
  return out;
}

void TaskSpec::validate() const {
  if (positive == negative) throw Error(ErrorCode::kConfig, "task needs two distinct groups");
  if (variables.empty()) throw Error(ErrorCode::kConfig, "task needs at least one variable");
  std::set<Variable> unique(variables.begin(), variables.end());
  if (unique.size() != variables.size()) throw Error(ErrorCode::kConfig, "variables repeat");
  if (state == StatePolicy::kOffOn && (positive == Group::kCO || negative == Group::kCO)) {
    throw Error(ErrorCode::kConfig, "Off+On needs two medicated groups; controls have one state");
  }
  if (descriptor.nbins == 0) throw Error(ErrorCode::kConfig, "nbins must be positive");
  if (descriptor.layer == 0) throw Error(ErrorCode::kConfig, "landscape layer must be >= 1");
  if (!(descriptor.silhouette_power > 0.0)) {
    throw Error(ErrorCode::kConfig, "silhouette power must be positive");
  }
  if (embedding.dim == 0 || embedding.delay == 0) {
    throw Error(ErrorCode::kConfig, "embedding dimension and delay must be positive");
  }
}

Featurizer::Featurizer(const GaitDataset& dataset, const TaskSpec& task)
    : dataset_(dataset), task_(task), blocks_(task.blocks()) {}

const PersistenceDiagram& Featurizer::diagram(const std::string& subject_id,
                                              const VectorBlock& block) const {
  const auto group_it = dataset_.subjects().find(subject_id);
  if (group_it == dataset_.subjects().end()) {
    throw Error(ErrorCode::kValidation, "unknown subject " + subject_id);
  }
  const State state = group_it->second == Group::kCO ? State::kNone : block.state;
  const auto key = std::make_tuple(subject_id, block.variable, state);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const GaitSeries* series = dataset_.find(subject_id, block.variable, state);
  if (!series) {
    throw Error(ErrorCode::kValidation, "subject " + subject_id + " has no " +
                                            std::string(to_string(block.variable)) + " series in state " +
                                            std::string(to_string(state)));
  }
  const std::vector<double> values =
      task_.standardize ? standardize(series->values) : series->values;
  PersistenceDiagram dgm =
      cap_infinite(rips_persistence(pairwise_distances(takens_embed(values, task_.embedding))));
  std::lock_guard lock(mutex_);
  return cache_.emplace(key, std::move(dgm)).first->second;
}

std::vector<std::array<SamplingGrid, 2>> Featurizer::fit_grids(
    std::span<const std::string> subjects) const {
  std::vector<std::array<SamplingGrid, 2>> grids;
  for (const VectorBlock& block : blocks_) {
    std::vector<PersistenceDiagram> diagrams;
    diagrams.reserve(subjects.size());
    for (const auto& id : subjects) diagrams.push_back(diagram(id, block));
    grids.push_back({fit_grid(diagrams, 0, task_.descriptor.nbins),
                     fit_grid(diagrams, 1, task_.descriptor.nbins)});
  }
  return grids;
}

DescriptorVector Featurizer::featurize(const std::string& subject_id,
                                       std::span<const std::array<SamplingGrid, 2>> grids) const {
  if (grids.size() != blocks_.size()) {
    throw Error(ErrorCode::kGridMismatch, "one grid pair per feature block expected");
  }
  std::vector<DescriptorVector> parts;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    DescriptorVector v = vectorize(diagram(subject_id, blocks_[b]), grids[b], task_.descriptor);
    v.subject_id = subject_id;
    v.blocks = {blocks_[b]};
    parts.push_back(std::move(v));
  }
  return concat_variables(parts);
}

std::vector<std::string> task_subjects(const GaitDataset& dataset, const TaskSpec& task) {
  auto ids = dataset.subjects_in(task.positive);
  const auto neg = dataset.subjects_in(task.negative);
  ids.insert(ids.end(), neg.begin(), neg.end());
  return ids;
}

void check_fold(const FoldAudit& fold, GridFit grid_fit) {
  const auto contains = [&](const std::vector<std::string>& ids) {
    return std::find(ids.begin(), ids.end(), fold.held_out) != ids.end();
  };
  if (contains(fold.train_subjects)) {
    throw Error(ErrorCode::kLeakage, "held-out subject " + fold.held_out + " is in the training set");
  }
  if (grid_fit == GridFit::kFold && contains(fold.grid_subjects)) {
    throw Error(ErrorCode::kLeakage, "held-out subject " + fold.held_out + " was used to fit grids");
  }
}

EvaluationReport loocv(const GaitDataset& dataset, const TaskSpec& task,
                       const ForestParams& forest, std::size_t workers) {
  task.validate();
  const auto subjects = task_subjects(dataset, task);
  const auto counts = dataset.group_counts();
  if (!counts.contains(task.positive) || !counts.contains(task.negative)) {
    throw Error(ErrorCode::kValidation, "dataset lacks one of the task groups");
  }
  if (subjects.size() < 3) throw Error(ErrorCode::kValidation, "too few subjects for LOOCV");

  Featurizer featurizer(dataset, task);
  const auto blocks = task.blocks();
  // Diagrams do not depend on the fold; compute them once up front.
  parallel_for(subjects.size(), workers, [&](std::size_t i) {
    for (const auto& block : blocks) featurizer.diagram(subjects[i], block);
  });

  EvaluationReport report;
  report.task = task;
  report.forest = forest;
  report.per_subject.resize(subjects.size());
  report.folds.resize(subjects.size());
  const std::size_t fold_workers = std::min(workers, subjects.size());
  ForestParams fold_forest = forest;
  fold_forest.workers = fold_workers > 1 ? 1 : forest.workers;

  parallel_for(subjects.size(), fold_workers, [&](std::size_t i) {
    const std::string& held_out = subjects[i];
    FoldAudit audit;
    audit.held_out = held_out;
    for (const auto& id : subjects) {
      if (id != held_out) audit.train_subjects.push_back(id);
    }
    audit.grid_subjects = task.grid_fit == GridFit::kFold ? audit.train_subjects : subjects;
    check_fold(audit, task.grid_fit);

    const auto grids = featurizer.fit_grids(audit.grid_subjects);
    FeatureMatrix x;
    std::vector<std::uint8_t> labels;
    for (const auto& id : audit.train_subjects) {
      x.append_row(featurizer.featurize(id, grids).values);
      labels.push_back(dataset.subjects().at(id) == task.positive ? 1 : 0);
    }
    const auto model = RandomForest::train(x, labels, fold_forest);

    const auto test = featurizer.featurize(held_out, grids);
    const double score = model.predict_score(test.values);
    const Group truth = dataset.subjects().at(held_out);
    report.per_subject[i] = {held_out, truth, score >= 0.5 ? task.positive : task.negative, score};
    report.folds[i] = std::move(audit);
  });

  const auto summary = compute_metrics(report.per_subject, task.positive);
  report.metrics = summary.metrics;
  report.confusion = summary.confusion;
  return report;
}

FeatureTable featurize_all(const GaitDataset& dataset, const TaskSpec& task) {
  task.validate();
  FeatureTable table;
  table.subject_ids = task_subjects(dataset, task);
  Featurizer featurizer(dataset, task);
  const auto grids = featurizer.fit_grids(table.subject_ids);
  for (const auto& id : table.subject_ids) {
    const auto v = featurizer.featurize(id, grids);
    if (table.columns.empty()) table.columns = feature_names(v, task.descriptor.nbins);
    table.features.append_row(v.values);
    table.labels.push_back(dataset.subjects().at(id));
  }
  return table;
}

}  // namespace tdagait
