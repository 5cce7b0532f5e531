// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tdagait/classify.hpp"
#include "tdagait/descriptors.hpp"
#include "tdagait/error.hpp"
#include "tdagait/experiment.hpp"
#include "tdagait/homology.hpp"
#include "tdagait/metrics.hpp"
#include "tdagait/synthgait.hpp"

using namespace tdagait;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tdagait_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Random 2-D cloud; every other cloud is snapped to a coarse lattice so
// that equal distances (and hence filtration ties) are common.
PointCloud test_cloud(std::mt19937_64& rng, std::size_t n, bool lattice) {
  PointCloud cloud = oracle::random_cloud(rng, n);
  if (lattice) {
    for (double& c : cloud.coords) c = std::floor(c * 4.0) / 4.0;
  }
  return cloud;
}

Outcome homology_oracle() {
  Outcome out;
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> size(1, 8);
  const auto start = Clock::now();
  std::size_t clouds = 0, h1_pairs = 0;
  for (; clouds < 1000; ++clouds) {
    const auto cloud = test_cloud(rng, size(rng), clouds % 2 == 1);
    const auto dm = pairwise_distances(cloud);
    const auto fast = rips_persistence(dm);
    const auto slow = brute_force_persistence(dm);
    h1_pairs += slow.in_degree(1).size();
    if (!same_pairs(fast, slow)) {
      out.fail("cloud " + std::to_string(clouds) + " differs from the boundary-matrix oracle");
    }
  }
  const double secs = seconds_since(start);
  if (secs >= 60.0) out.fail("runtime " + fixed(secs, 1) + " s >= 60 s");
  if (out.pass) {
    out.detail = std::to_string(clouds) + " clouds exact (" + std::to_string(h1_pairs) +
                 " H1 pairs), " + fixed(secs, 2) + " s";
  }
  return out;
}

Outcome mst_property() {
  Outcome out;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> size(2, 40);
  for (int trial = 0; trial < 500; ++trial) {
    const auto cloud = oracle::random_cloud(rng, size(rng));
    const auto dm = pairwise_distances(cloud);
    const auto dgm = rips_persistence(dm, 0);
    std::vector<double> deaths;
    for (const auto& p : dgm.in_degree(0)) {
      if (std::isfinite(p.death)) deaths.push_back(p.death);
    }
    std::sort(deaths.begin(), deaths.end());
    if (deaths != oracle::mst_weights(dm)) {
      out.fail("cloud " + std::to_string(trial) + ": H0 deaths differ from MST weights");
    }
  }
  if (out.pass) out.detail = "500 clouds, H0 deaths == MST edge weights";
  return out;
}

Outcome geometry_cases() {
  Outcome out;
  PointCloud square{2, {0, 0, 1, 0, 1, 1, 0, 1}};
  const auto sq = rips_persistence(pairwise_distances(square)).in_degree(1);
  if (sq.size() != 1) {
    out.fail("unit square has " + std::to_string(sq.size()) + " H1 pairs");
  } else if (std::abs(sq[0].birth - 1.0) > 1e-12 ||
             std::abs(sq[0].death - std::sqrt(2.0)) > 1e-12) {
    out.fail("unit square H1 pair is off");
  }
  const double h = std::sqrt(3.0) / 2.0;
  PointCloud triangle{2, {0, 0, 1, 0, 0.5, h}};
  const auto tri = rips_persistence(pairwise_distances(triangle)).in_degree(1);
  if (!tri.empty()) out.fail("equilateral triangle has H1 pairs");
  if (out.pass) out.detail = "square H1 = {(1, sqrt 2)}, triangle H1 empty";
  return out;
}

Outcome descriptor_identities() {
  Outcome out;
  std::mt19937_64 rng(4242);
  std::size_t grid_points = 0, limit_checked = 0, near_ties = 0;
  double worst_limit = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto dgm = oracle::random_diagram(rng, 10);
    const std::vector<PersistenceDiagram> one = {dgm};
    for (int degree = 0; degree < 2; ++degree) {
      const auto grid = fit_grid(one, degree, 25);
      const auto pts = grid.points();
      const auto bc = betti_curve(dgm, grid);
      const auto l1 = landscape(dgm, grid, 1);
      const auto l2 = landscape(dgm, grid, 2);
      for (std::size_t t = 0; t < pts.size(); ++t) {
        ++grid_points;
        if (bc[t] != oracle::betti_at(dgm.pairs, degree, pts[t])) {
          out.fail("Betti count mismatch on diagram " + std::to_string(trial));
        }
        if (l1[t] < l2[t]) out.fail("landscape layers out of order on diagram " +
                                    std::to_string(trial));
      }

      const auto pairs = dgm.in_degree(degree);
      if (pairs.size() < 2) continue;
      auto best = std::max_element(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        return a.persistence() < b.persistence();
      });
      double runner_up = 0.0;
      std::size_t at_max = 0;
      for (const auto& p : pairs) {
        if (p.persistence() == best->persistence()) {
          ++at_max;
        } else {
          runner_up = std::max(runner_up, p.persistence());
        }
      }
      if (at_max != 1) continue;
      // The p-th power weight share of the runner-up decays like r^p; for
      // r close to 1 it does not vanish at p = 50, so only diagrams with a
      // clear maximizer (r <= 0.8) are held to the 1e-3 bound.
      if (runner_up > 0.8 * best->persistence()) {
        ++near_ties;
        continue;
      }
      const auto sl = silhouette(dgm, grid, 50.0);
      for (std::size_t t = 0; t < pts.size(); ++t) {
        const double err = std::abs(sl[t] - oracle::tent(best->birth, best->death, pts[t]));
        worst_limit = std::max(worst_limit, err);
      }
      ++limit_checked;
    }
  }
  if (worst_limit >= 1e-3) out.fail("p = 50 silhouette off by " + std::to_string(worst_limit));
  if (limit_checked < 20) out.fail("too few clear-maximizer diagrams");

  std::uniform_real_distribution<double> unit(0.0, 3.0);
  std::size_t single = 0;
  for (int trial = 0; trial < 200; ++trial) {
    double b = unit(rng), d = unit(rng);
    if (d < b) std::swap(b, d);
    if (d == b) continue;
    PersistenceDiagram dgm;
    dgm.pairs = {{1, b, d}};
    dgm.max_filtration = d;
    const std::vector<PersistenceDiagram> one = {dgm};
    const auto grid = fit_grid(one, 1, 25);
    const auto pts = grid.points();
    for (double p : {0.5, 1.0, 2.0, 20.0}) {
      const auto sl = silhouette(dgm, grid, p);
      for (std::size_t t = 0; t < pts.size(); ++t) {
        if (sl[t] != oracle::tent(b, d, pts[t])) {
          out.fail("single-pair silhouette differs from its tent at p = " + fixed(p, 1));
        }
      }
    }
    ++single;
  }
  if (out.pass) {
    out.detail = "200 diagrams / " + std::to_string(grid_points) +
                 " grid points exact; p=50 max error " + fixed(worst_limit, 6) + " over " +
                 std::to_string(limit_checked) + " clear maximizers; " + std::to_string(single) +
                 " single pairs exact";
  }
  out.notes.push_back(std::to_string(near_ties) +
                      " panels with a unique but near-tied maximizer (runner-up > 0.8) skipped "
                      "for the p = 50 bound");
  return out;
}

Outcome feature_shapes() {
  Outcome out;
  const auto ds = generate_cohort(SynthConfig::two_class(5, 4, 0.3, 3));
  TaskSpec single;
  const auto one = featurize_all(ds, single);
  if (one.features.cols() != 50) {
    out.fail("single-variable length " + std::to_string(one.features.cols()));
  }
  TaskSpec triplet;
  triplet.state = StatePolicy::kOn;
  triplet.variables = {Variable::kMaxHC, Variable::kMinTC, Variable::kMaxTLSW};
  const auto three = featurize_all(ds, triplet);
  if (three.features.cols() != 150) {
    out.fail("triplet length " + std::to_string(three.features.cols()));
  }

  const auto dir = scratch("grid");
  RunConfig base;
  base.forest.n_trees = 50;
  base.forest.seed = 1;
  base.task.variables.assign(kAllVariables.begin(), kAllVariables.end());
  const auto cells = run_grid(ds, base, SweepSpec{{2}, {}}, OutputOptions{dir, 1, false});
  std::size_t reports = 0;
  for (const auto& c : cells) {
    if (c.report && fs::exists(dir / c.name / "report.json")) ++reports;
  }
  if (reports != 15 || cells.size() != 15) {
    out.fail("2-variable grid produced " + std::to_string(reports) + " reports");
  }
  if (out.pass) out.detail = "lengths 50 / 150, 2-of-6 grid wrote 15 reports";
  return out;
}

struct NarratedMatrix {
  const char* label;
  ConfusionMatrix cm;
  double accuracy, sensitivity, specificity;  // printed table entries
};

Outcome confusion_arithmetic() {
  Outcome out;
  // Confusion counts narrated alongside the single-variable (state-wise)
  // and variable-pair confusion figures, with the printed table rows.
  const std::vector<NarratedMatrix> rows = {
      {"MinTC Off", {10, 5, 5, 9}, 0.66, 0.67, 0.64},
      {"MinTC On", {11, 4, 4, 10}, 0.72, 0.73, 0.71},
      {"MinTC Off+On", {12, 3, 5, 9}, 0.72, 0.80, 0.74},
      {"MaxTLSW Off", {9, 6, 4, 10}, 0.66, 0.60, 0.71},
      {"MaxTLSW On", {11, 4, 4, 10}, 0.72, 0.73, 0.71},
      {"MaxTLSW Off+On", {12, 3, 3, 11}, 0.79, 0.80, 0.79},
      {"MinTC+MaxTLSW Off", {10, 5, 4, 10}, 0.69, 0.67, 0.71},
      {"MinTC+MaxTLSW On", {12, 3, 4, 10}, 0.79, 0.80, 0.71},
      {"MaxTLSW+StrikeAngle Off", {10, 5, 5, 9}, 0.66, 0.67, 0.64},
      {"MaxTLSW+StrikeAngle On", {13, 2, 4, 10}, 0.79, 0.87, 0.71},
  };
  // Printed entries that no integer confusion matrix of the stated cohort
  // and narrated counts can produce. Checked and reported, not gated.
  const std::vector<std::pair<std::string, std::string>> inconsistent = {
      {"MinTC Off+On", "specificity"},
      {"MinTC+MaxTLSW On", "accuracy"},
  };
  const auto is_known = [&](const std::string& label, const std::string& metric) {
    for (const auto& [l, m] : inconsistent) {
      if (l == label && m == metric) return true;
    }
    return false;
  };

  std::size_t checked = 0;
  for (const auto& row : rows) {
    std::vector<SubjectResult> subjects;
    const auto add = [&](std::size_t count, Group truth, Group predicted, double score) {
      for (std::size_t i = 0; i < count; ++i) {
        subjects.push_back({"s" + std::to_string(subjects.size()), truth, predicted, score});
      }
    };
    add(row.cm.tp, Group::kIPD, Group::kIPD, 0.8);
    add(row.cm.fn, Group::kIPD, Group::kVaP, 0.3);
    add(row.cm.fp, Group::kVaP, Group::kIPD, 0.7);
    add(row.cm.tn, Group::kVaP, Group::kVaP, 0.2);
    const auto got = compute_metrics(subjects, Group::kIPD);
    if (!(got.confusion == row.cm)) out.fail(std::string(row.label) + ": confusion mismatch");
    const std::pair<std::string, std::pair<double, double>> metrics[] = {
        {"accuracy", {got.metrics.accuracy, row.accuracy}},
        {"sensitivity", {*got.metrics.sensitivity, row.sensitivity}},
        {"specificity", {*got.metrics.specificity, row.specificity}},
    };
    for (const auto& [name, values] : metrics) {
      const bool ok = std::abs(values.first - values.second) <= 0.005;
      if (is_known(row.label, name)) {
        out.notes.push_back(std::string(row.label) + " " + name + ": counts give " +
                            fixed(values.first, 3) + ", table prints " +
                            fixed(values.second, 2) + (ok ? " (agrees)" : " (not reachable)"));
        continue;
      }
      ++checked;
      if (!ok) {
        out.fail(std::string(row.label) + " " + name + " " + fixed(values.first, 3) + " vs " +
                 fixed(values.second, 2));
      }
    }
  }
  if (out.pass) {
    out.detail = std::to_string(rows.size()) + " narrated matrices, " + std::to_string(checked) +
                 " entries within 0.005";
  }
  return out;
}

Outcome synthetic_end_to_end() {
  Outcome out;
  const auto start = Clock::now();
  TaskSpec task;
  ForestParams forest;
  forest.seed = 7;

  const auto clean = generate_cohort(SynthConfig::two_class(15, 14, 0.0, 7));
  const auto report = loocv(clean, task, forest);
  if (report.metrics.accuracy != 1.0 || report.metrics.auc != 1.0) {
    out.fail("zero-noise accuracy " + fixed(report.metrics.accuracy, 3) + ", AUC " +
             fixed(report.metrics.auc.value_or(-1), 3));
  }

  constexpr double kModerateNoise = 0.5;
  double auc_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto noisy = generate_cohort(SynthConfig::two_class(15, 14, kModerateNoise, seed));
    forest.seed = seed;
    auc_sum += loocv(noisy, task, forest).metrics.auc.value_or(0.0);
  }
  const double mean_auc = auc_sum / 10.0;
  if (mean_auc < 0.9) out.fail("noise " + fixed(kModerateNoise, 2) + " mean AUC " + fixed(mean_auc, 3));
  const double secs = seconds_since(start);
  if (secs >= 300.0) out.fail("runtime " + fixed(secs, 1) + " s >= 300 s");
  if (out.pass) {
    out.detail = "zero noise acc 1.000 AUC 1.000; noise " + fixed(kModerateNoise, 2) +
                 " mean AUC " + fixed(mean_auc, 3) + " over 10 seeds; " + fixed(secs, 1) + " s";
  }
  return out;
}

Outcome determinism() {
  Outcome out;
  const auto dir = scratch("determinism");
  const auto ds = generate_cohort(SynthConfig::two_class(15, 14, 0.5, 11));
  save_dataset(dir / "cohort.csv", ds);
  RunConfig cfg;
  cfg.dataset = (dir / "cohort.csv").string();
  cfg.task.state = StatePolicy::kOffOn;
  cfg.task.variables = {Variable::kMinTC, Variable::kMaxTLSW};
  cfg.forest.seed = 99;
  for (std::size_t workers : {1u, 4u}) {
    run_experiment(cfg, OutputOptions{dir / ("w" + std::to_string(workers)), workers, true});
  }
  for (const char* file : {"report.json", "summary.txt", "features.csv"}) {
    const auto a = slurp(dir / "w1" / file);
    if (a.empty() || a != slurp(dir / "w4" / file)) {
      out.fail(std::string(file) + " differs between 1 and 4 workers");
    }
  }

  RunConfig grid_base = cfg;
  grid_base.forest.n_trees = 100;
  grid_base.task.state = StatePolicy::kOff;
  grid_base.task.variables = {Variable::kMaxHC, Variable::kMinTC, Variable::kMaxTLSW};
  for (std::size_t workers : {1u, 4u}) {
    run_grid(ds, grid_base, SweepSpec{{2}, {}},
             OutputOptions{dir / ("g" + std::to_string(workers)), workers, false});
  }
  if (slurp(dir / "g1" / "grid_summary.json") != slurp(dir / "g4" / "grid_summary.json")) {
    out.fail("grid summary differs between 1 and 4 workers");
  }
  if (out.pass) out.detail = "report, summary, features and grid summary byte-identical";
  return out;
}

Outcome leakage_guard() {
  Outcome out;
  const auto ds = generate_cohort(SynthConfig::three_class(15, 15, 14, 21));
  ForestParams forest;
  forest.n_trees = 50;
  std::size_t folds = 0;
  const auto audit = [&](const TaskSpec& task, const std::string& label) {
    const auto report = loocv(ds, task, forest, 2);
    const auto subjects = task_subjects(ds, task);
    if (report.folds.size() != subjects.size()) out.fail(label + ": fold count");
    for (const auto& fold : report.folds) {
      try {
        check_fold(fold, task.grid_fit);
      } catch (const Error& e) {
        out.fail(label + ": " + e.what());
      }
      // Training and grid sets are subject ids, so both state vectors of the
      // held-out subject leave together; confirm every other subject stays.
      if (fold.train_subjects.size() + 1 != subjects.size()) {
        out.fail(label + ": fold does not train on all other subjects");
      }
      ++folds;
    }
  };
  for (auto state : {StatePolicy::kOff, StatePolicy::kOn, StatePolicy::kOffOn}) {
    TaskSpec task;
    task.state = state;
    task.variables = {Variable::kMinTC, Variable::kMaxTLSW};
    audit(task, "IPD-vs-VaP " + std::string(to_string(state)));
  }
  TaskSpec co;
  co.positive = Group::kIPD;
  co.negative = Group::kCO;
  audit(co, "CO-vs-IPD");

  // The guard itself must trip on a forged fold.
  bool tripped = false;
  try {
    check_fold(FoldAudit{"IPD01", {"IPD02"}, {"IPD01", "IPD02"}}, GridFit::kFold);
  } catch (const Error& e) {
    tripped = e.code() == ErrorCode::kLeakage;
  }
  if (!tripped) out.fail("forged leaking fold was not rejected");
  if (out.pass) out.detail = std::to_string(folds) + " folds clean (Off, On, Off+On, CO task)";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"homology oracle equivalence", homology_oracle},
      {"MST property", mst_property},
      {"analytic geometry cases", geometry_cases},
      {"descriptor identities", descriptor_identities},
      {"feature-shape contract", feature_shapes},
      {"confusion-matrix arithmetic", confusion_arithmetic},
      {"synthetic end-to-end", synthetic_end_to_end},
      {"determinism across workers", determinism},
      {"leakage guard", leakage_guard},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": "
              << o.detail << std::endl;
    for (const auto& note : o.notes) std::cout << "     note: " << note << std::endl;
    if (!o.pass) ++failures;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
