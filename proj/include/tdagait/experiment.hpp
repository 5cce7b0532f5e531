#pragma once
// End-to-end runs: configuration, single experiments, variable sweeps and
// the files they produce.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdagait/classify.hpp"

namespace tdagait {

/// Effective configuration of one run. Everything that can change a report
/// lives here and is echoed into it; worker count and output location do not
/// change results and are kept outside.
struct RunConfig {
  std::string dataset;
  TaskSpec task{};
  ForestParams forest{};

  bool operator==(const RunConfig& other) const;
};

/// `IPD-vs-VaP` style names. The positive class is the first group, except
/// in control tasks (`CO-vs-IPD`) where it is the disease group.
std::string task_name(Group positive, Group negative);
std::optional<std::pair<Group, Group>> parse_task_name(std::string_view text);

nlohmann::ordered_json to_json(const RunConfig& cfg);
/// Missing keys keep their defaults; unknown values throw ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});

nlohmann::ordered_json to_json(const EvaluationReport& report, const RunConfig& cfg);
/// Report text as written to disk (2-space indent, trailing newline).
std::string report_text(const EvaluationReport& report, const RunConfig& cfg);

/// Table layout: Gait Variable | State | AUC | Accuracy | Sensitivity | Specificity.
std::string summary_table(const EvaluationReport& report);
/// Summary from a report JSON document produced by `to_json`.
std::string summary_table(const nlohmann::json& report);

struct OutputOptions {
  std::filesystem::path out_dir;
  std::size_t workers = 1;
  bool write_artifacts = true;  // features, diagrams and plots besides the report
};

struct ExperimentResult {
  EvaluationReport report;
  std::filesystem::path report_path;
};

/// Loads the dataset, runs LOOCV and writes report.json and summary.txt
/// (plus features.csv, diagrams/ and plots/ when write_artifacts is set).
ExperimentResult run_experiment(const RunConfig& cfg, const OutputOptions& out);
/// Same, for a dataset already in memory.
ExperimentResult run_experiment(const GaitDataset& dataset, const RunConfig& cfg,
                                const OutputOptions& out);

struct SweepSpec {
  std::vector<std::size_t> subset_sizes;  // k in k-of-n variable subsets
  std::vector<StatePolicy> states;        // empty: the template's state only
};

struct GridCell {
  RunConfig config;
  std::string name;
  std::optional<EvaluationReport> report;
  std::string error;  // set when the cell failed
};

/// Variable subsets of the template's variable list, in lexicographic order.
std::vector<std::vector<Variable>> variable_subsets(const std::vector<Variable>& pool,
                                                    std::size_t k);

/// One cell per (subset, state). Cells run on `out.workers` threads; a failed
/// cell is recorded and the sweep continues. Writes one directory per cell
/// plus grid_summary.txt / grid_summary.json ranked by AUC.
std::vector<GridCell> run_grid(const GaitDataset& dataset, const RunConfig& base,
                               const SweepSpec& sweep, const OutputOptions& out);

/// Ranked summary (descending AUC, cells without AUC last, ties in sweep order).
std::string grid_summary_table(const std::vector<GridCell>& cells);
std::vector<std::size_t> rank_cells(const std::vector<GridCell>& cells);

/// Writes `contents` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace tdagait
