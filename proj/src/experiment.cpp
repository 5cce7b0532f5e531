#include "tdagait/experiment.hpp"

#include <algorithm>
#include <utility>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "tdagait/error.hpp"
#include "tdagait/parallel.hpp"
#include "tdagait/plots.hpp"

namespace tdagait {

using nlohmann::json;
using nlohmann::ordered_json;

bool RunConfig::operator==(const RunConfig& other) const {
  return to_json(*this) == to_json(other);
}

std::string task_name(Group positive, Group negative) {
  // Control tasks are written control first, as in CO-vs-IPD.
  if (negative == Group::kCO) std::swap(positive, negative);
  return std::string(to_string(positive)) + "-vs-" + std::string(to_string(negative));
}

std::optional<std::pair<Group, Group>> parse_task_name(std::string_view text) {
  const auto sep = text.find("-vs-");
  if (sep == std::string_view::npos) return std::nullopt;
  const auto a = parse_group(text.substr(0, sep));
  const auto b = parse_group(text.substr(sep + 4));
  if (!a || !b || *a == *b) return std::nullopt;
  if (*a == Group::kCO) return std::make_pair(*b, *a);
  return std::make_pair(*a, *b);
}

ordered_json to_json(const RunConfig& cfg) {
  const TaskSpec& t = cfg.task;
  ordered_json variables = ordered_json::array();
  for (Variable v : t.variables) variables.push_back(std::string(to_string(v)));
  ordered_json forest = {
      {"n_trees", cfg.forest.n_trees},
      {"max_features", cfg.forest.max_features.describe()},
      {"min_samples_leaf", cfg.forest.min_samples_leaf},
      {"max_depth", cfg.forest.max_depth ? ordered_json(*cfg.forest.max_depth) : ordered_json()},
  };
  return ordered_json{
      {"dataset", cfg.dataset},
      {"task", task_name(t.positive, t.negative)},
      {"state", std::string(to_string(t.state))},
      {"variables", variables},
      {"descriptor", std::string(to_string(t.descriptor.kind))},
      {"embedding", {{"dim", t.embedding.dim}, {"tau", t.embedding.delay}}},
      {"nbins", t.descriptor.nbins},
      {"landscape_layer", t.descriptor.layer},
      {"silhouette_p", t.descriptor.silhouette_power},
      {"standardize", t.standardize},
      {"grid_fit", std::string(to_string(t.grid_fit))},
      {"forest", forest},
      {"seed", cfg.forest.seed},
  };
}

namespace {

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorCode::kConfig, what); }

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad_config(std::string("config key '") + key + "': " + e.what());
  }
}

std::string fmt2(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << *v;
  return os.str();
}

std::string join_variables(const std::vector<std::string>& names, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? sep : "") + names[i];
  return out;
}

std::string table_row(const std::string& variables, const std::string& state,
                      const std::optional<double>& auc, double acc,
                      const std::optional<double>& sens, const std::optional<double>& spec) {
  std::ostringstream os;
  os << std::left << std::setw(28) << variables << std::setw(8) << state << std::setw(6)
     << fmt2(auc) << "  " << std::setw(8) << fmt2(acc) << "  " << std::setw(11) << fmt2(sens)
     << "  " << fmt2(spec) << '\n';
  return os.str();
}

std::string table_header(const std::string& task, const std::string& descriptor) {
  std::ostringstream os;
  os << "Task: " << task << "   Descriptor: " << descriptor << '\n';
  os << std::left << std::setw(28) << "Gait Variable" << std::setw(8) << "State" << std::setw(6)
     << "AUC" << "  " << std::setw(8) << "Accuracy" << "  " << std::setw(11) << "Sensitivity"
     << "  " << "Specificity" << '\n';
  return os.str();
}

std::optional<double> opt_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string cell_name(const RunConfig& cfg) {
  std::vector<std::string> names;
  for (Variable v : cfg.task.variables) names.emplace_back(to_string(v));
  std::string state(to_string(cfg.task.state));
  state.erase(std::remove(state.begin(), state.end(), '+'), state.end());
  return join_variables(names, "+") + "_" + state;
}

std::string diagram_file_name(const std::string& subject, const VectorBlock& block, Group group) {
  const State st = group == Group::kCO ? State::kNone : block.state;
  return subject + "_" + std::string(to_string(block.variable)) + "_" +
         std::string(to_string(st)) + ".csv";
}

std::string features_csv(const FeatureTable& table) {
  std::ostringstream os;
  os << "subject_id,label";
  for (const auto& c : table.columns) os << ',' << c;
  os << '\n';
  char buf[64];
  for (std::size_t r = 0; r < table.subject_ids.size(); ++r) {
    os << table.subject_ids[r] << ',' << to_string(table.labels[r]);
    for (double v : table.features.row(r)) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), v);
      os << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    os << '\n';
  }
  return os.str();
}

void write_artifacts(const GaitDataset& dataset, const RunConfig& cfg,
                     const EvaluationReport& report, const std::filesystem::path& dir) {
  const TaskSpec& task = cfg.task;
  write_file_atomic(dir / "features.csv", features_csv(featurize_all(dataset, task)));

  Featurizer featurizer(dataset, task);
  const auto blocks = task.blocks();
  const auto subjects = task_subjects(dataset, task);
  std::filesystem::create_directories(dir / "diagrams");
  std::vector<LabelledDiagram> first_block;
  for (const auto& id : subjects) {
    const Group g = dataset.subjects().at(id);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& dgm = featurizer.diagram(id, blocks[b]);
      std::ostringstream os;
      write_diagram(os, dgm);
      write_file_atomic(dir / "diagrams" / diagram_file_name(id, blocks[b], g), os.str());
      if (b == 0) first_block.push_back({g, dgm});
    }
  }
  std::filesystem::create_directories(dir / "plots");
  write_file_atomic(dir / "plots" / "confusion.svg", confusion_svg(report));
  write_file_atomic(dir / "plots" / "diagrams.svg",
                    diagram_scatter_svg(first_block, task.positive, task.negative));
  write_file_atomic(dir / "plots" / "betti_overlay.svg",
                    betti_overlay_svg(first_block, task.positive, task.negative,
                                      task.descriptor.nbins));
}

}  // namespace

RunConfig run_config_from_json(const json& j, RunConfig base) {
  if (!j.is_object()) bad_config("config must be a JSON object");
  RunConfig cfg = std::move(base);
  TaskSpec& t = cfg.task;
  if (j.contains("dataset")) cfg.dataset = get_as<std::string>(j, "dataset");
  if (j.contains("task")) {
    const auto pair = parse_task_name(get_as<std::string>(j, "task"));
    if (!pair) bad_config("task must look like IPD-vs-VaP");
    t.positive = pair->first;
    t.negative = pair->second;
  }
  if (j.contains("state")) {
    const auto s = parse_state_policy(get_as<std::string>(j, "state"));
    if (!s) bad_config("state must be Off, On or Off+On");
    t.state = *s;
  }
  if (j.contains("variables")) {
    t.variables.clear();
    for (const auto& name : get_as<std::vector<std::string>>(j, "variables")) {
      const auto v = parse_variable(name);
      if (!v) bad_config("unknown variable '" + name + "'");
      t.variables.push_back(*v);
    }
  }
  if (j.contains("descriptor")) {
    const auto k = parse_descriptor_kind(get_as<std::string>(j, "descriptor"));
    if (!k) bad_config("descriptor must be BC, PL or SL");
    t.descriptor.kind = *k;
  }
  if (j.contains("embedding")) {
    const json& e = j.at("embedding");
    if (e.contains("dim")) t.embedding.dim = get_as<std::size_t>(e, "dim");
    if (e.contains("tau")) t.embedding.delay = get_as<std::size_t>(e, "tau");
  }
  if (j.contains("nbins")) t.descriptor.nbins = get_as<std::size_t>(j, "nbins");
  if (j.contains("landscape_layer")) t.descriptor.layer = get_as<std::size_t>(j, "landscape_layer");
  if (j.contains("silhouette_p")) t.descriptor.silhouette_power = get_as<double>(j, "silhouette_p");
  if (j.contains("standardize")) t.standardize = get_as<bool>(j, "standardize");
  if (j.contains("grid_fit")) {
    const auto g = parse_grid_fit(get_as<std::string>(j, "grid_fit"));
    if (!g) bad_config("grid_fit must be fold or all");
    t.grid_fit = *g;
  }
  if (j.contains("forest")) {
    const json& f = j.at("forest");
    if (f.contains("n_trees")) cfg.forest.n_trees = get_as<std::size_t>(f, "n_trees");
    if (f.contains("max_features")) {
      const json& mf = f.at("max_features");
      const std::string text = mf.is_number() ? std::to_string(mf.get<std::size_t>())
                                              : get_as<std::string>(f, "max_features");
      const auto parsed = MaxFeatures::parse(text);
      if (!parsed) bad_config("max_features must be sqrt, all or a positive integer");
      cfg.forest.max_features = *parsed;
    }
    if (f.contains("min_samples_leaf")) {
      cfg.forest.min_samples_leaf = get_as<std::size_t>(f, "min_samples_leaf");
    }
    if (f.contains("max_depth")) {
      if (f.at("max_depth").is_null()) {
        cfg.forest.max_depth.reset();
      } else {
        cfg.forest.max_depth = get_as<std::size_t>(f, "max_depth");
      }
    }
  }
  if (j.contains("seed")) cfg.forest.seed = get_as<std::uint64_t>(j, "seed");
  t.validate();
  return cfg;
}

ordered_json to_json(const EvaluationReport& report, const RunConfig& cfg) {
  const TaskSpec& t = report.task;
  ordered_json variables = ordered_json::array();
  for (Variable v : t.variables) variables.push_back(std::string(to_string(v)));
  const auto num = [](const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json();
  };
  ordered_json subjects = ordered_json::array();
  for (const auto& r : report.per_subject) {
    subjects.push_back({{"subject_id", r.subject_id},
                        {"true", std::string(to_string(r.truth))},
                        {"predicted", std::string(to_string(r.predicted))},
                        {"score", r.score}});
  }
  return ordered_json{
      {"task", task_name(t.positive, t.negative)},
      {"positive_class", std::string(to_string(t.positive))},
      {"state", std::string(to_string(t.state))},
      {"variables", variables},
      {"descriptor", std::string(to_string(t.descriptor.kind))},
      {"metrics",
       {{"auc", num(report.metrics.auc)},
        {"accuracy", report.metrics.accuracy},
        {"sensitivity", num(report.metrics.sensitivity)},
        {"specificity", num(report.metrics.specificity)}}},
      {"confusion",
       {{"tp", report.confusion.tp},
        {"fn", report.confusion.fn},
        {"fp", report.confusion.fp},
        {"tn", report.confusion.tn}}},
      {"subjects", subjects},
      {"config", to_json(cfg)},
  };
}

std::string report_text(const EvaluationReport& report, const RunConfig& cfg) {
  return to_json(report, cfg).dump(2) + "\n";
}

std::string summary_table(const EvaluationReport& report) {
  std::vector<std::string> names;
  for (Variable v : report.task.variables) names.emplace_back(to_string(v));
  const auto& m = report.metrics;
  return table_header(task_name(report.task.positive, report.task.negative),
                      std::string(to_string(report.task.descriptor.kind))) +
         table_row(join_variables(names, " + "), std::string(to_string(report.task.state)), m.auc,
                   m.accuracy, m.sensitivity, m.specificity);
}

std::string summary_table(const json& report) {
  try {
    const json& m = report.at("metrics");
    return table_header(report.at("task").get<std::string>(),
                        report.at("descriptor").get<std::string>()) +
           table_row(join_variables(report.at("variables").get<std::vector<std::string>>(), " + "),
                     report.at("state").get<std::string>(), opt_number(m, "auc"),
                     m.at("accuracy").get<double>(), opt_number(m, "sensitivity"),
                     opt_number(m, "specificity"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("not a report: ") + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename onto " + path.string() + ": " + ec.message());
}

ExperimentResult run_experiment(const RunConfig& cfg, const OutputOptions& out) {
  if (cfg.dataset.empty()) throw Error(ErrorCode::kConfig, "no dataset given");
  return run_experiment(load_dataset(cfg.dataset), cfg, out);
}

ExperimentResult run_experiment(const GaitDataset& dataset, const RunConfig& cfg,
                                const OutputOptions& out) {
  cfg.task.validate();
  ExperimentResult result;
  result.report = loocv(dataset, cfg.task, cfg.forest, out.workers);
  for (const auto& fold : result.report.folds) check_fold(fold, cfg.task.grid_fit);
  if (!out.out_dir.empty()) {
    std::filesystem::create_directories(out.out_dir);
    result.report_path = out.out_dir / "report.json";
    write_file_atomic(result.report_path, report_text(result.report, cfg));
    write_file_atomic(out.out_dir / "summary.txt", summary_table(result.report));
    if (out.write_artifacts) write_artifacts(dataset, cfg, result.report, out.out_dir);
  }
  return result;
}

std::vector<std::vector<Variable>> variable_subsets(const std::vector<Variable>& pool,
                                                    std::size_t k) {
  std::vector<std::vector<Variable>> out;
  if (k == 0 || k > pool.size()) return out;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    std::vector<Variable> subset;
    for (std::size_t i : idx) subset.push_back(pool[i]);
    out.push_back(std::move(subset));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == pool.size() - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

std::vector<std::size_t> rank_cells(const std::vector<GridCell>& cells) {
  std::vector<std::size_t> order(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto auc_of = [&](std::size_t i) -> std::optional<double> {
    if (!cells[i].report) return std::nullopt;
    return cells[i].report->metrics.auc;
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto x = auc_of(a);
    const auto y = auc_of(b);
    if (x.has_value() != y.has_value()) return x.has_value();
    return x && *x > *y;
  });
  return order;
}

std::string grid_summary_table(const std::vector<GridCell>& cells) {
  std::ostringstream os;
  if (!cells.empty()) {
    const auto& t = cells.front().config.task;
    os << "Task: " << task_name(t.positive, t.negative)
       << "   Descriptor: " << to_string(t.descriptor.kind) << '\n';
  }
  os << std::left << std::setw(6) << "Rank" << std::setw(44) << "Variables" << std::setw(8)
     << "State" << std::setw(6) << "Accu" << "  " << std::setw(6) << "AUC" << "  "
     << std::setw(6) << "Sens" << "  " << "Spec" << '\n';
  std::size_t rank = 1;
  for (std::size_t i : rank_cells(cells)) {
    const GridCell& c = cells[i];
    std::vector<std::string> names;
    for (Variable v : c.config.task.variables) names.emplace_back(to_string(v));
    os << std::left << std::setw(6) << rank++ << std::setw(44) << join_variables(names, " + ")
       << std::setw(8) << to_string(c.config.task.state);
    if (c.report) {
      const auto& m = c.report->metrics;
      os << std::setw(6) << fmt2(m.accuracy) << "  " << std::setw(6) << fmt2(m.auc) << "  "
         << std::setw(6) << fmt2(m.sensitivity) << "  " << fmt2(m.specificity) << '\n';
    } else {
      os << "FAILED: " << c.error << '\n';
    }
  }
  return os.str();
}

std::vector<GridCell> run_grid(const GaitDataset& dataset, const RunConfig& base,
                               const SweepSpec& sweep, const OutputOptions& out) {
  if (sweep.subset_sizes.empty()) throw Error(ErrorCode::kConfig, "empty sweep specification");
  const std::vector<StatePolicy> states =
      sweep.states.empty() ? std::vector<StatePolicy>{base.task.state} : sweep.states;
  std::vector<GridCell> cells;
  for (std::size_t k : sweep.subset_sizes) {
    const auto subsets = variable_subsets(base.task.variables, k);
    if (subsets.empty()) {
      throw Error(ErrorCode::kConfig, "subset size " + std::to_string(k) + " does not fit " +
                                          std::to_string(base.task.variables.size()) +
                                          " variables");
    }
    for (const auto& subset : subsets) {
      for (StatePolicy s : states) {
        GridCell cell;
        cell.config = base;
        cell.config.task.variables = subset;
        cell.config.task.state = s;
        cell.name = cell_name(cell.config);
        cells.push_back(std::move(cell));
      }
    }
  }

  parallel_for(cells.size(), out.workers, [&](std::size_t i) {
    GridCell& cell = cells[i];
    try {
      OutputOptions cell_out;
      cell_out.workers = 1;
      cell_out.write_artifacts = false;
      if (!out.out_dir.empty()) cell_out.out_dir = out.out_dir / cell.name;
      cell.report = run_experiment(dataset, cell.config, cell_out).report;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });

  if (!out.out_dir.empty()) {
    write_file_atomic(out.out_dir / "grid_summary.txt", grid_summary_table(cells));
    ordered_json rows = ordered_json::array();
    for (std::size_t i : rank_cells(cells)) {
      const GridCell& c = cells[i];
      ordered_json row = {{"cell", c.name}};
      if (c.report) {
        const auto& m = c.report->metrics;
        row["auc"] = m.auc ? ordered_json(*m.auc) : ordered_json();
        row["accuracy"] = m.accuracy;
        row["sensitivity"] = m.sensitivity ? ordered_json(*m.sensitivity) : ordered_json();
        row["specificity"] = m.specificity ? ordered_json(*m.specificity) : ordered_json();
      } else {
        row["error"] = c.error;
      }
      rows.push_back(std::move(row));
    }
    write_file_atomic(out.out_dir / "grid_summary.json", rows.dump(2) + "\n");
  }
  return cells;
}

}  // namespace tdagait
