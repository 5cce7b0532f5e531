#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tdagait/descriptors.hpp"
#include "tdagait/error.hpp"

using namespace tdagait;

namespace {

PersistenceDiagram dgm_of(std::vector<PersistencePair> pairs) {
  PersistenceDiagram d;
  for (const auto& p : pairs) d.max_filtration = std::max(d.max_filtration, p.death);
  d.pairs = std::move(pairs);
  return d;
}

SamplingGrid grid_of(double lo, double hi, std::size_t nbins, int degree) {
  return SamplingGrid{lo, hi, nbins, degree, false};
}

using V = std::vector<double>;

}  // namespace

TEST_CASE("fit_grid examples") {
  const std::vector<PersistenceDiagram> h0 = {dgm_of({{0, 0, 1}, {0, 0, 2}})};
  const auto g = fit_grid(h0, 0, 5);
  CHECK(g.points() == V{0, 0.5, 1, 1.5, 2});

  const std::vector<PersistenceDiagram> one = {dgm_of({{1, 1, 3}})};
  CHECK(fit_grid(one, 1, 3).points() == V{1, 2, 3});

  const auto empty = fit_grid(h0, 1, 25);
  CHECK(empty.empty);
  CHECK(empty.t_min == 0.0);
  CHECK(empty.t_max == 0.0);
  CHECK(betti_curve(h0[0], empty) == V(25, 0.0));
  CHECK(landscape(h0[0], empty) == V(25, 0.0));
  CHECK(silhouette(h0[0], empty) == V(25, 0.0));

  const std::vector<PersistenceDiagram> spread = {dgm_of({{1, 0.5, 1}}), dgm_of({{1, 0.25, 4}})};
  const auto g2 = fit_grid(spread, 1, 4);
  CHECK(g2.t_min == 0.25);
  CHECK(g2.t_max == 4.0);

  const std::vector<PersistenceDiagram> infinite = {dgm_of({{0, 0, kInfinity}})};
  CHECK_THROWS_AS(fit_grid(infinite, 0, 5), Error);
}

TEST_CASE("betti_curve examples") {
  CHECK(betti_curve(dgm_of({{1, 1, std::sqrt(2.0)}}), grid_of(0, 2, 5, 1)) == V{0, 0, 1, 0, 0});
  CHECK(betti_curve(dgm_of({{0, 0, 2}, {0, 1, 3}}), grid_of(0.5, 2.5, 3, 0)) == V{1, 2, 1});
  CHECK(betti_curve(PersistenceDiagram{}, grid_of(0, 1, 4, 0)) == V{0, 0, 0, 0});
  // Death is exclusive, birth inclusive.
  CHECK(betti_curve(dgm_of({{0, 1, 2}}), grid_of(1, 2, 2, 0)) == V{1, 0});
}

TEST_CASE("landscape examples") {
  CHECK(landscape(dgm_of({{0, 0, 2}}), grid_of(0, 2, 3, 0), 1) == V{0, 1, 0});
  CHECK(landscape(dgm_of({{0, 0, 2}, {0, 0, 2}}), grid_of(1, 1, 1, 0), 2) == V{1});
  // Second-largest of the tents {2, 1} at t = 2.
  const auto pairs = std::vector<PersistencePair>{{0, 0, 4}, {0, 1, 3}};
  CHECK(landscape(dgm_of(pairs), grid_of(2, 2, 1, 0), 2) == V{1});
  CHECK(oracle::landscape_at(pairs, 0, 2, 2.0) == 1.0);
  // Fewer pairs than the layer.
  CHECK(landscape(dgm_of({{0, 0, 2}}), grid_of(0, 2, 3, 0), 2) == V{0, 0, 0});
  CHECK_THROWS_AS(landscape(dgm_of({{0, 0, 2}}), grid_of(0, 2, 3, 0), 0), Error);
}

TEST_CASE("silhouette examples") {
  const auto single = dgm_of({{0, 0, 2}});
  const auto g = grid_of(0, 2, 9, 0);
  for (double p : {0.5, 1.0, 2.0, 20.0}) {
    CHECK(silhouette(single, g, p) == landscape(single, g, 1));
  }
  const auto two = dgm_of({{0, 0, 2}, {0, 0, 4}});
  CHECK(silhouette(two, grid_of(2, 2, 1, 0), 1.0)[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  const double sharp = silhouette(two, grid_of(2, 2, 1, 0), 20.0)[0];
  CHECK(std::abs(sharp - 2.0) < 1e-2);
  CHECK(sharp == doctest::Approx(oracle::silhouette_at(two.pairs, 0, 20.0, 2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(silhouette(two, g, 0.0), Error);
  CHECK(silhouette(PersistenceDiagram{}, g, 1.0) == V(9, 0.0));
}

TEST_CASE("descriptors agree with pointwise oracles on random diagrams") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto dgm = oracle::random_diagram(rng, 12);
    for (int degree = 0; degree < 2; ++degree) {
      const std::vector<PersistenceDiagram> one = {dgm};
      const auto grid = fit_grid(one, degree, 2 + trial % 30);
      if (grid.empty) continue;
      const auto pts = grid.points();
      const auto bc = betti_curve(dgm, grid);
      const auto pl1 = landscape(dgm, grid, 1);
      const auto pl2 = landscape(dgm, grid, 2);
      const auto pl3 = landscape(dgm, grid, 3);
      const auto sl = silhouette(dgm, grid, 1.5);
      for (std::size_t t = 0; t < pts.size(); ++t) {
        REQUIRE(bc[t] == oracle::betti_at(dgm.pairs, degree, pts[t]));
        REQUIRE(pl1[t] == oracle::landscape_at(dgm.pairs, degree, 1, pts[t]));
        REQUIRE(pl2[t] == oracle::landscape_at(dgm.pairs, degree, 2, pts[t]));
        REQUIRE(pl1[t] >= pl2[t]);
        REQUIRE(pl2[t] >= pl3[t]);
        REQUIRE(sl[t] == doctest::Approx(oracle::silhouette_at(dgm.pairs, degree, 1.5, pts[t]))
                             .epsilon(1e-12));
        // Bounded by the smallest and largest tent.
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& p : dgm.pairs) {
          if (p.degree != degree) continue;
          lo = std::min(lo, oracle::tent(p.birth, p.death, pts[t]));
          hi = std::max(hi, oracle::tent(p.birth, p.death, pts[t]));
        }
        REQUIRE(sl[t] >= lo - 1e-12);
        REQUIRE(sl[t] <= hi + 1e-12);
      }
    }
  }
}

TEST_CASE("silhouette approaches the most persistent tent as p grows") {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto dgm = oracle::random_diagram(rng, 8);
    const auto h1 = dgm.in_degree(1);
    if (h1.size() < 2) continue;
    auto best = std::max_element(h1.begin(), h1.end(), [](const auto& a, const auto& b) {
      return a.persistence() < b.persistence();
    });
    // Require a clear maximizer.
    bool unique = true;
    for (const auto& p : h1) {
      if (&p != &*best && p.persistence() > 0.8 * best->persistence()) unique = false;
    }
    if (!unique) continue;
    const std::vector<PersistenceDiagram> one = {dgm};
    const auto grid = fit_grid(one, 1, 25);
    const auto sl = silhouette(dgm, grid, 50.0);
    const auto pts = grid.points();
    for (std::size_t t = 0; t < pts.size(); ++t) {
      REQUIRE(std::abs(sl[t] - oracle::tent(best->birth, best->death, pts[t])) < 1e-3);
    }
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("descriptors ignore pair order and zero-persistence pairs") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    auto dgm = oracle::random_diagram(rng, 10);
    const std::vector<PersistenceDiagram> one = {dgm};
    const std::array<SamplingGrid, 2> grids = {fit_grid(one, 0, 25), fit_grid(one, 1, 25)};
    auto shuffled = dgm;
    std::shuffle(shuffled.pairs.begin(), shuffled.pairs.end(), rng);
    auto padded = dgm;
    padded.pairs.push_back({1, 0.5, 0.5});
    padded.pairs.push_back({0, 0.0, 0.0});
    for (auto kind : {DescriptorKind::kBettiCurve, DescriptorKind::kLandscape,
                      DescriptorKind::kSilhouette}) {
      DescriptorParams params;
      params.kind = kind;
      const auto base = vectorize(dgm, grids, params).values;
      REQUIRE(vectorize(padded, grids, params).values == base);
      const auto perm = vectorize(shuffled, grids, params).values;
      for (std::size_t i = 0; i < base.size(); ++i) {
        REQUIRE(perm[i] == doctest::Approx(base[i]).epsilon(1e-12));
      }
      if (kind != DescriptorKind::kSilhouette) REQUIRE(perm == base);
    }
  }
}

TEST_CASE("vectorize shape and errors") {
  const auto dgm = dgm_of({{0, 0, 1}, {0, 0, 2}, {1, 0.5, 1.5}});
  const std::vector<PersistenceDiagram> one = {dgm};
  std::array<SamplingGrid, 2> grids = {fit_grid(one, 0, 25), fit_grid(one, 1, 25)};
  for (auto kind : {DescriptorKind::kBettiCurve, DescriptorKind::kLandscape,
                    DescriptorKind::kSilhouette}) {
    DescriptorParams params;
    params.kind = kind;
    CHECK(vectorize(dgm, grids, params).values.size() == 50);
  }

  const auto no_h1 = dgm_of({{0, 0, 1}});
  const std::vector<PersistenceDiagram> none = {no_h1};
  const std::array<SamplingGrid, 2> g0 = {fit_grid(none, 0, 25), fit_grid(none, 1, 25)};
  const auto v = vectorize(no_h1, g0, DescriptorParams{}).values;
  CHECK(std::all_of(v.begin() + 25, v.end(), [](double x) { return x == 0.0; }));
  CHECK(std::all_of(v.begin(), v.begin() + 25, [](double x) { return x >= 0.0; }));

  DescriptorParams five;
  five.nbins = 5;
  const std::array<SamplingGrid, 2> g5 = {fit_grid(one, 0, 5), fit_grid(one, 1, 5)};
  CHECK(vectorize(dgm, g5, five).values.size() == 10);

  std::array<SamplingGrid, 2> swapped = {grids[1], grids[0]};
  try {
    vectorize(dgm, swapped, DescriptorParams{});
    FAIL("expected GridMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kGridMismatch);
  }
}

TEST_CASE("concat_variables") {
  DescriptorVector a{DescriptorKind::kBettiCurve, V(50, 1.0), "s1", {{Variable::kMaxHC, State::kOff}}};
  DescriptorVector b{DescriptorKind::kBettiCurve, V(50, 2.0), "s1", {{Variable::kMinTC, State::kOff}}};
  DescriptorVector c{DescriptorKind::kBettiCurve, V(50, 3.0), "s1", {{Variable::kMaxTLSW, State::kOff}}};
  const std::vector<DescriptorVector> two = {a, b};
  const auto ab = concat_variables(two);
  CHECK(ab.values.size() == 100);
  CHECK(ab.values[49] == 1.0);
  CHECK(ab.values[50] == 2.0);
  const std::vector<DescriptorVector> three = {a, b, c};
  const auto abc = concat_variables(three);
  CHECK(abc.values.size() == 150);
  CHECK(abc.blocks.size() == 3);

  DescriptorVector on = a;
  on.blocks = {{Variable::kMaxHC, State::kOn}};
  const std::vector<DescriptorVector> fused = {a, on};
  CHECK(concat_variables(fused).values.size() == 100);

  DescriptorVector other = b;
  other.subject_id = "s2";
  const std::vector<DescriptorVector> mixed_subject = {a, other};
  CHECK_THROWS_AS(concat_variables(mixed_subject), Error);
  DescriptorVector pl = b;
  pl.kind = DescriptorKind::kLandscape;
  const std::vector<DescriptorVector> mixed_kind = {a, pl};
  try {
    concat_variables(mixed_kind);
    FAIL("expected KindMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kKindMismatch);
  }
}

TEST_CASE("feature names") {
  DescriptorVector one{DescriptorKind::kBettiCurve, {}, "s", {{Variable::kMinTC, State::kOff}}};
  const auto names = feature_names(one, 25);
  REQUIRE(names.size() == 50);
  CHECK(names.front() == "BC_H0_00");
  CHECK(names[25] == "BC_H1_00");
  CHECK(names.back() == "BC_H1_24");
  DescriptorVector two{DescriptorKind::kLandscape, {}, "s",
                       {{Variable::kMinTC, State::kOff}, {Variable::kMinTC, State::kOn}}};
  const auto fused = feature_names(two, 25);
  CHECK(fused.size() == 100);
  CHECK(fused[50] == "PL_MinTC_On_H0_00");
}
