#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "tdagait/classify.hpp"
#include "tdagait/error.hpp"
#include "tdagait/synthgait.hpp"

using namespace tdagait;

namespace {

ForestParams small_forest(std::uint64_t seed = 3) {
  ForestParams p;
  p.n_trees = 25;
  p.seed = seed;
  return p;
}

GaitDataset toy(std::size_t ipd, std::size_t vap, double noise = 0.3, std::uint64_t seed = 11) {
  auto cfg = SynthConfig::two_class(ipd, vap, noise, seed);
  cfg.variables = {Variable::kMinTC, Variable::kMaxTLSW};
  return generate_cohort(cfg);
}

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("toy dataset gives one fold per subject, each training on the rest") {
  const auto ds = toy(2, 2);
  const auto report = loocv(ds, TaskSpec{}, small_forest());
  REQUIRE(report.folds.size() == 4);
  REQUIRE(report.per_subject.size() == 4);
  for (const auto& fold : report.folds) {
    CHECK(fold.train_subjects.size() == 3);
    CHECK(fold.grid_subjects.size() == 3);
    CHECK(std::find(fold.train_subjects.begin(), fold.train_subjects.end(), fold.held_out) ==
          fold.train_subjects.end());
    CHECK_NOTHROW(check_fold(fold, GridFit::kFold));
  }
}

TEST_CASE("cohort-sized tasks give the expected fold counts") {
  const auto ds = generate_cohort(SynthConfig::three_class(15, 15, 14, 5));
  TaskSpec ipd_vap;
  CHECK(loocv(ds, ipd_vap, small_forest()).folds.size() == 29);
  TaskSpec co_ipd;
  co_ipd.positive = Group::kIPD;
  co_ipd.negative = Group::kCO;
  const auto report = loocv(ds, co_ipd, small_forest());
  CHECK(report.folds.size() == 30);
  CHECK(report.confusion.tp + report.confusion.fn == 15);
  CHECK(report.confusion.fp + report.confusion.tn == 15);
}

TEST_CASE("stored metrics are recomputable from the per-subject rows") {
  const auto ds = toy(6, 5, 0.6);
  TaskSpec task;
  task.state = StatePolicy::kOffOn;
  const auto report = loocv(ds, task, small_forest());
  const auto again = compute_metrics(report.per_subject, task.positive);
  CHECK(again.metrics == report.metrics);
  CHECK(again.confusion == report.confusion);
  CHECK(report.confusion.tp + report.confusion.fn == 6);
  CHECK(report.confusion.fp + report.confusion.tn == 5);
  for (const auto& row : report.per_subject) {
    CHECK(row.score >= 0.0);
    CHECK(row.score <= 1.0);
    CHECK((row.predicted == task.positive) == (row.score >= 0.5));
  }
}

TEST_CASE("results do not depend on fold workers") {
  const auto ds = toy(5, 5, 0.5);
  TaskSpec task;
  task.variables = {Variable::kMinTC, Variable::kMaxTLSW};
  const auto a = loocv(ds, task, small_forest(), 1);
  const auto b = loocv(ds, task, small_forest(), 3);
  CHECK(a.per_subject == b.per_subject);
  CHECK(a.metrics == b.metrics);
}

TEST_CASE("Off+On vectors are state-major and twice as long") {
  const auto ds = toy(3, 3);
  TaskSpec task;
  task.state = StatePolicy::kOffOn;
  task.variables = {Variable::kMinTC, Variable::kMaxTLSW};
  const auto blocks = task.blocks();
  REQUIRE(blocks.size() == 4);
  CHECK(blocks[0].state == State::kOff);
  CHECK(blocks[1].state == State::kOff);
  CHECK(blocks[1].variable == Variable::kMaxTLSW);
  CHECK(blocks[2].state == State::kOn);
  CHECK(blocks[2].variable == Variable::kMinTC);
  const auto table = featurize_all(ds, task);
  CHECK(table.features.cols() == 200);
  CHECK(table.columns.size() == 200);
  CHECK(table.columns.front() == "BC_MinTC_Off_H0_00");
  CHECK(table.columns.back() == "BC_MaxTLSW_On_H1_24");
  CHECK(table.subject_ids.size() == 6);
}

TEST_CASE("leakage guard rejects forged folds") {
  FoldAudit fold{"IPD01", {"IPD02", "VaP01"}, {"IPD01", "IPD02", "VaP01"}};
  CHECK(error_of([&] { check_fold(fold, GridFit::kFold); }) == ErrorCode::kLeakage);
  FoldAudit grid_only{"IPD01", {"IPD01", "VaP01"}, {"IPD02", "VaP01"}};
  CHECK(error_of([&] { check_fold(grid_only, GridFit::kFold); }) == ErrorCode::kLeakage);
  CHECK_NOTHROW(check_fold(grid_only, GridFit::kAll));
}

TEST_CASE("a subject missing a series is named in the error") {
  auto series = toy(2, 2).series();
  series.erase(std::remove_if(series.begin(), series.end(),
                              [](const GaitSeries& s) {
                                return s.subject_id == "VaP02" && s.state == State::kOn &&
                                       s.variable == Variable::kMinTC;
                              }),
               series.end());
  const GaitDataset ds(series);
  TaskSpec task;
  task.state = StatePolicy::kOn;
  try {
    loocv(ds, task, small_forest());
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kValidation);
    CHECK(std::string(e.what()).find("VaP02") != std::string::npos);
  }
  task.state = StatePolicy::kOff;
  CHECK_NOTHROW(loocv(ds, task, small_forest()));
}

TEST_CASE("invalid task specs") {
  TaskSpec co_fusion;
  co_fusion.negative = Group::kCO;
  co_fusion.state = StatePolicy::kOffOn;
  CHECK(error_of([&] { co_fusion.validate(); }) == ErrorCode::kConfig);
  TaskSpec same;
  same.negative = Group::kIPD;
  CHECK(error_of([&] { same.validate(); }) == ErrorCode::kConfig);
  TaskSpec none;
  none.variables.clear();
  CHECK(error_of([&] { none.validate(); }) == ErrorCode::kConfig);
}

TEST_CASE("state policy names") {
  CHECK(to_string(StatePolicy::kOffOn) == "Off+On");
  CHECK(parse_state_policy("off+on") == StatePolicy::kOffOn);
  CHECK(parse_state_policy("ON") == StatePolicy::kOn);
  CHECK_FALSE(parse_state_policy("both").has_value());
  CHECK(parse_grid_fit("all") == GridFit::kAll);
}
