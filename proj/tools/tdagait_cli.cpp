// Command-line front end for the topological gait pipeline.

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tdagait/error.hpp"
#include "tdagait/experiment.hpp"
#include "tdagait/kernels.hpp"
#include "tdagait/synthgait.hpp"

namespace {

using namespace tdagait;

struct PipelineFlags {
  std::string config_file;
  std::string dataset;
  std::string task;
  std::string state;
  std::string vars;
  std::string descriptor;
  std::string grid_fit;
  std::string max_features;
  std::optional<std::size_t> nbins, dim, tau, layer, trees, min_leaf, max_depth;
  std::optional<double> sil_p;
  std::optional<std::uint64_t> seed;
  bool standardize = false;
};

std::string default_out_dir() {
  if (const char* env = std::getenv("TDAGAIT_OUT"); env && *env) return env;
  return "tdagait_out";
}

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
  cmd->add_option("--config", f.config_file, "JSON config file (or a report.json to re-run)");
  cmd->add_option("--dataset", f.dataset, "Dataset CSV file");
  cmd->add_option("--task", f.task, "Group pair, positive class first (e.g. IPD-vs-VaP)");
  cmd->add_option("--state", f.state, "Off, On or Off+On (default Off)");
  cmd->add_option("--vars", f.vars, "Comma-separated gait variables");
  cmd->add_option("--descriptor", f.descriptor, "BC, PL or SL");
  cmd->add_option("--nbins", f.nbins, "Grid points per homology degree (default 25)");
  cmd->add_option("--dim", f.dim, "Embedding dimension (default 2)");
  cmd->add_option("--tau", f.tau, "Embedding delay (default 1)");
  cmd->add_option("--sil-p", f.sil_p, "Silhouette power (default 1)");
  cmd->add_option("--layer", f.layer, "Landscape layer (default 1)");
  cmd->add_option("--seed", f.seed, "Forest seed (default 0)");
  cmd->add_option("--grid-fit", f.grid_fit, "fold (default) or all");
  cmd->add_option("--trees", f.trees, "Number of trees (default 500)");
  cmd->add_option("--max-features", f.max_features, "sqrt (default), all or an integer");
  cmd->add_option("--min-leaf", f.min_leaf, "Minimum samples per leaf (default 1)");
  cmd->add_option("--max-depth", f.max_depth, "Maximum tree depth (default unlimited)");
  cmd->add_flag("--standardize", f.standardize, "Z-score each series before embedding");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

RunConfig resolve_config(const PipelineFlags& f) {
  nlohmann::json j = nlohmann::json::object();
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw Error(ErrorCode::kIo, "cannot open config " + f.config_file);
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kConfig, f.config_file + ": " + e.what());
    }
    if (j.contains("config") && j.at("config").is_object()) j = j.at("config");
  }
  if (!f.dataset.empty()) j["dataset"] = f.dataset;
  if (!f.task.empty()) j["task"] = f.task;
  if (!f.state.empty()) j["state"] = f.state;
  if (!f.vars.empty()) j["variables"] = split_list(f.vars);
  if (!f.descriptor.empty()) j["descriptor"] = f.descriptor;
  if (f.nbins) j["nbins"] = *f.nbins;
  if (f.dim) j["embedding"]["dim"] = *f.dim;
  if (f.tau) j["embedding"]["tau"] = *f.tau;
  if (f.sil_p) j["silhouette_p"] = *f.sil_p;
  if (f.layer) j["landscape_layer"] = *f.layer;
  if (f.seed) j["seed"] = *f.seed;
  if (!f.grid_fit.empty()) j["grid_fit"] = f.grid_fit;
  if (f.trees) j["forest"]["n_trees"] = *f.trees;
  if (!f.max_features.empty()) j["forest"]["max_features"] = f.max_features;
  if (f.min_leaf) j["forest"]["min_samples_leaf"] = *f.min_leaf;
  if (f.max_depth) j["forest"]["max_depth"] = *f.max_depth;
  if (f.standardize) j["standardize"] = true;
  return run_config_from_json(j);
}

GaitDataset load_for(const RunConfig& cfg) {
  if (cfg.dataset.empty()) throw Error(ErrorCode::kConfig, "--dataset is required");
  return load_dataset(cfg.dataset);
}

bool wants(const RunConfig& cfg, const GaitSeries& s) {
  const auto& vars = cfg.task.variables;
  if (std::find(vars.begin(), vars.end(), s.variable) == vars.end()) return false;
  if (s.state == State::kNone) return true;
  switch (cfg.task.state) {
    case StatePolicy::kOff: return s.state == State::kOff;
    case StatePolicy::kOn: return s.state == State::kOn;
    case StatePolicy::kOffOn: return true;
  }
  return false;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return 2;
    case ErrorCode::kParse:
    case ErrorCode::kValidation:
    case ErrorCode::kTooShort: return 3;
    case ErrorCode::kIo: return 4;
    default: return 1;
  }
}

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological gait classification: embedding, persistent homology, descriptors, "
               "random forest LOOCV"};
  app.require_subcommand(1);
  std::string out_dir = default_out_dir();
  std::size_t workers = 1;
  std::string simd = "auto";
  app.add_option("--simd", simd, "Kernel backend: auto or scalar")->check(CLI::IsMember({"auto", "scalar"}));

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic cohort");
  std::string gen_out = "cohort.csv";
  std::string preset = "two-class";
  std::string counts;
  double noise = 0.3;
  std::size_t length = 36;
  std::uint64_t gen_seed = 0;
  gen->add_option("--out", gen_out, "Output dataset file");
  gen->add_option("--preset", preset, "two-class (IPD/VaP) or three-class (CO/IPD/VaP)")
      ->check(CLI::IsMember({"two-class", "three-class"}));
  gen->add_option("--counts", counts, "Subjects per class, e.g. 15,14 or 15,15,14");
  gen->add_option("--noise", noise, "VaP noise level (two-class preset)");
  gen->add_option("--length", length, "Samples per series");
  gen->add_option("--seed", gen_seed, "Generator seed");

  PipelineFlags embed_f, ph_f, feat_f, cls_f, grid_f;
  auto* embed = app.add_subcommand("embed", "Delay-embed series into point clouds");
  auto* ph = app.add_subcommand("ph", "Compute capped persistence diagrams");
  auto* feat = app.add_subcommand("featurize", "Write the descriptor feature matrix");
  auto* cls = app.add_subcommand("classify", "Run one LOOCV experiment");
  auto* grid = app.add_subcommand("grid", "Sweep variable subsets and states");
  for (auto [cmd, flags] : {std::pair{embed, &embed_f}, {ph, &ph_f}, {feat, &feat_f},
                            {cls, &cls_f}, {grid, &grid_f}}) {
    add_pipeline_flags(cmd, *flags);
    cmd->add_option("--out", out_dir, "Output directory (default $TDAGAIT_OUT or ./tdagait_out)");
    cmd->add_option("--workers", workers, "Worker threads");
  }
  std::string sweep_k = "2";
  std::string sweep_states;
  grid->add_option("--sweep-k", sweep_k, "Comma-separated subset sizes, e.g. 2,3");
  grid->add_option("--sweep-states", sweep_states, "Comma-separated states (default: --state)");

  auto* rep = app.add_subcommand("report", "Print summary tables of report files");
  std::vector<std::string> report_files;
  rep->add_option("reports", report_files, "report.json files")->required();

  CLI11_PARSE(app, argc, argv);
  if (simd == "scalar") kernels::set_active_backend(kernels::Backend::kScalar);

  try {
    if (gen->parsed()) {
      const auto c = split_list(counts);
      std::vector<std::size_t> n;
      for (const auto& s : c) n.push_back(std::stoul(s));
      SynthConfig cfg;
      if (preset == "two-class") {
        if (n.empty()) n = {15, 14};
        if (n.size() != 2) throw Error(ErrorCode::kConfig, "two-class needs two counts");
        cfg = SynthConfig::two_class(n[0], n[1], noise, gen_seed);
      } else {
        if (n.empty()) n = {15, 15, 14};
        if (n.size() != 3) throw Error(ErrorCode::kConfig, "three-class needs three counts");
        cfg = SynthConfig::three_class(n[0], n[1], n[2], gen_seed);
      }
      cfg.series_length = length;
      const auto ds = generate_cohort(cfg);
      std::ostringstream os;
      write_dataset(os, ds);
      write_file_atomic(gen_out, os.str());
      std::cout << "wrote " << ds.series().size() << " series for " << ds.subjects().size()
                << " subjects to " << gen_out << '\n';
      return 0;
    }
    if (embed->parsed()) {
      const auto cfg = resolve_config(embed_f);
      const auto ds = load_for(cfg);
      std::ostringstream os;
      os << "subject_id,group,state,variable,index";
      for (std::size_t k = 0; k < cfg.task.embedding.dim; ++k) os << ",x" << k;
      os << '\n';
      for (const auto& s : ds.series()) {
        if (!wants(cfg, s)) continue;
        const auto cloud = takens_embed(s, cfg.task.embedding);
        for (std::size_t i = 0; i < cloud.size(); ++i) {
          os << s.subject_id << ',' << to_string(s.group) << ',' << to_string(s.state) << ','
             << to_string(s.variable) << ',' << i;
          for (double v : cloud.point(i)) os << ',' << number(v);
          os << '\n';
        }
      }
      write_file_atomic(std::filesystem::path(out_dir) / "embeddings.csv", os.str());
      std::cout << "wrote " << (std::filesystem::path(out_dir) / "embeddings.csv").string() << '\n';
      return 0;
    }
    if (ph->parsed()) {
      const auto cfg = resolve_config(ph_f);
      const auto ds = load_for(cfg);
      std::size_t written = 0;
      for (const auto& s : ds.series()) {
        if (!wants(cfg, s)) continue;
        const auto values = cfg.task.standardize ? standardize(s.values) : s.values;
        const auto dgm = cap_infinite(
            rips_persistence(pairwise_distances(takens_embed(values, cfg.task.embedding))));
        std::ostringstream os;
        write_diagram(os, dgm);
        write_file_atomic(std::filesystem::path(out_dir) / "diagrams" /
                              (s.subject_id + "_" + std::string(to_string(s.variable)) + "_" +
                               std::string(to_string(s.state)) + ".csv"),
                          os.str());
        ++written;
      }
      std::cout << "wrote " << written << " diagrams to " << out_dir << "/diagrams\n";
      return 0;
    }
    if (feat->parsed()) {
      const auto cfg = resolve_config(feat_f);
      const auto ds = load_for(cfg);
      const auto table = featurize_all(ds, cfg.task);
      std::ostringstream os;
      os << "subject_id,label";
      for (const auto& c : table.columns) os << ',' << c;
      os << '\n';
      for (std::size_t r = 0; r < table.subject_ids.size(); ++r) {
        os << table.subject_ids[r] << ',' << to_string(table.labels[r]);
        for (double v : table.features.row(r)) os << ',' << number(v);
        os << '\n';
      }
      write_file_atomic(std::filesystem::path(out_dir) / "features.csv", os.str());
      std::cout << "wrote " << table.subject_ids.size() << " x " << table.columns.size()
                << " features to " << out_dir << "/features.csv\n";
      return 0;
    }
    if (cls->parsed()) {
      const auto cfg = resolve_config(cls_f);
      OutputOptions out{out_dir, workers, true};
      const auto result = run_experiment(cfg, out);
      std::cout << summary_table(result.report);
      std::cout << "report: " << result.report_path.string() << '\n';
      return 0;
    }
    if (grid->parsed()) {
      auto flags = grid_f;
      if (flags.vars.empty()) flags.vars = "LiftOffAngle,MaxHC,MaxTESW,MinTC,MaxTLSW,StrikeAngle";
      const auto cfg = resolve_config(flags);
      SweepSpec sweep;
      for (const auto& k : split_list(sweep_k)) sweep.subset_sizes.push_back(std::stoul(k));
      for (const auto& s : split_list(sweep_states)) {
        const auto p = parse_state_policy(s);
        if (!p) throw Error(ErrorCode::kConfig, "unknown state '" + s + "'");
        sweep.states.push_back(*p);
      }
      if (sweep.subset_sizes.empty()) throw Error(ErrorCode::kConfig, "empty sweep specification");
      const auto ds = load_for(cfg);
      const auto cells = run_grid(ds, cfg, sweep, OutputOptions{out_dir, workers, false});
      std::cout << grid_summary_table(cells);
      return 0;
    }
    if (rep->parsed()) {
      for (const auto& path : report_files) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorCode::kParse, path + ": " + e.what());
        }
        std::cout << summary_table(j) << '\n';
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
