#include "tdagait/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "tdagait/error.hpp"
#include "tdagait/kernels.hpp"

namespace tdagait {

std::string_view to_string(DescriptorKind kind) {
  switch (kind) {
    case DescriptorKind::kBettiCurve: return "BC";
    case DescriptorKind::kLandscape: return "PL";
    case DescriptorKind::kSilhouette: return "SL";
  }
  return "?";
}

std::optional<DescriptorKind> parse_descriptor_kind(std::string_view text) {
  for (auto k : {DescriptorKind::kBettiCurve, DescriptorKind::kLandscape,
                 DescriptorKind::kSilhouette}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

std::vector<double> SamplingGrid::points() const {
  std::vector<double> pts(nbins, t_min);
  if (nbins < 2) return pts;
  const double step = (t_max - t_min) / static_cast<double>(nbins - 1);
  for (std::size_t i = 0; i < nbins; ++i) pts[i] = t_min + static_cast<double>(i) * step;
  pts.back() = t_max;
  return pts;
}

SamplingGrid fit_grid(std::span<const PersistenceDiagram> diagrams, int degree,
                      std::size_t nbins) {
  if (nbins == 0) throw Error(ErrorCode::kConfig, "nbins must be positive");
  SamplingGrid grid;
  grid.nbins = nbins;
  grid.degree = degree;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& dgm : diagrams) {
    for (const auto& p : dgm.pairs) {
      if (p.degree != degree) continue;
      if (std::isinf(p.death)) {
        throw Error(ErrorCode::kValidation, "fit_grid needs capped diagrams");
      }
      lo = std::min(lo, p.birth);
      hi = std::max(hi, p.death);
    }
  }
  if (lo > hi) {
    grid.empty = true;
    return grid;
  }
  grid.t_min = lo;
  grid.t_max = hi;
  return grid;
}

namespace {

struct Bars {
  std::vector<double> births;
  std::vector<double> deaths;
};

Bars bars_at(const PersistenceDiagram& dgm, int degree) {
  Bars bars;
  for (const auto& p : dgm.pairs) {
    if (p.degree != degree || !(p.death > p.birth)) continue;
    bars.births.push_back(p.birth);
    bars.deaths.push_back(p.death);
  }
  return bars;
}

}  // namespace

std::vector<double> betti_curve(const PersistenceDiagram& dgm, const SamplingGrid& grid) {
  std::vector<double> out(grid.nbins, 0.0);
  if (grid.empty) return out;
  const auto pts = grid.points();
  const auto bars = bars_at(dgm, grid.degree);
  const auto& kt = kernels::active();
  for (std::size_t j = 0; j < bars.births.size(); ++j) {
    kt.betti_accumulate(bars.births[j], bars.deaths[j], pts, out);
  }
  return out;
}

std::vector<double> landscape(const PersistenceDiagram& dgm, const SamplingGrid& grid,
                              std::size_t layer) {
  if (layer == 0) throw Error(ErrorCode::kConfig, "landscape layer must be >= 1");
  std::vector<double> out(grid.nbins, 0.0);
  if (grid.empty) return out;
  const auto pts = grid.points();
  const auto bars = bars_at(dgm, grid.degree);
  const std::size_t m = bars.births.size();
  if (m < layer) return out;
  const auto& kt = kernels::active();
  if (layer == 1) {
    for (std::size_t j = 0; j < m; ++j) kt.tent_max(bars.births[j], bars.deaths[j], pts, out);
    return out;
  }
  // tents[j * nbins + t]
  std::vector<double> tents(m * grid.nbins);
  for (std::size_t j = 0; j < m; ++j) {
    kt.tent_row(bars.births[j], bars.deaths[j], pts,
                std::span<double>(tents).subspan(j * grid.nbins, grid.nbins));
  }
  std::vector<double> column(m);
  for (std::size_t t = 0; t < grid.nbins; ++t) {
    for (std::size_t j = 0; j < m; ++j) column[j] = tents[j * grid.nbins + t];
    std::nth_element(column.begin(), column.begin() + static_cast<long>(layer - 1), column.end(),
                     std::greater<>());
    out[t] = column[layer - 1];
  }
  return out;
}

std::vector<double> silhouette(const PersistenceDiagram& dgm, const SamplingGrid& grid,
                               double power) {
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw Error(ErrorCode::kConfig, "silhouette power must be a positive finite number");
  }
  std::vector<double> out(grid.nbins, 0.0);
  if (grid.empty) return out;
  const auto pts = grid.points();
  const auto bars = bars_at(dgm, grid.degree);
  if (bars.births.empty()) return out;
  double longest = 0.0;
  for (std::size_t j = 0; j < bars.births.size(); ++j) {
    longest = std::max(longest, bars.deaths[j] - bars.births[j]);
  }
  // Weights relative to the longest bar; the ratio equals |d-b|^p / sum.
  const auto& kt = kernels::active();
  double total = 0.0;
  for (std::size_t j = 0; j < bars.births.size(); ++j) {
    const double w = std::pow((bars.deaths[j] - bars.births[j]) / longest, power);
    total += w;
    kt.tent_weighted_add(bars.births[j], bars.deaths[j], w, pts, out);
  }
  for (double& v : out) v /= total;
  return out;
}

DescriptorVector vectorize(const PersistenceDiagram& dgm, std::span<const SamplingGrid> grids,
                           const DescriptorParams& params) {
  if (grids.size() != 2) {
    throw Error(ErrorCode::kGridMismatch, "expected one grid per degree (H0, H1)");
  }
  DescriptorVector vec;
  vec.kind = params.kind;
  vec.values.reserve(2 * params.nbins);
  for (int degree = 0; degree < 2; ++degree) {
    const SamplingGrid& grid = grids[static_cast<std::size_t>(degree)];
    if (grid.degree != degree) {
      throw Error(ErrorCode::kGridMismatch, "grid for H" + std::to_string(degree) +
                                                " has degree " + std::to_string(grid.degree));
    }
    if (grid.nbins != params.nbins) {
      throw Error(ErrorCode::kGridMismatch, "grid nbins differs from descriptor nbins");
    }
    std::vector<double> block;
    switch (params.kind) {
      case DescriptorKind::kBettiCurve: block = betti_curve(dgm, grid); break;
      case DescriptorKind::kLandscape: block = landscape(dgm, grid, params.layer); break;
      case DescriptorKind::kSilhouette: block = silhouette(dgm, grid, params.silhouette_power); break;
    }
    vec.values.insert(vec.values.end(), block.begin(), block.end());
  }
  return vec;
}

DescriptorVector concat_variables(std::span<const DescriptorVector> vectors) {
  if (vectors.empty()) throw Error(ErrorCode::kValidation, "nothing to concatenate");
  DescriptorVector out;
  out.kind = vectors.front().kind;
  out.subject_id = vectors.front().subject_id;
  for (const auto& v : vectors) {
    if (v.kind != out.kind) throw Error(ErrorCode::kKindMismatch, "mixed descriptor kinds");
    if (v.subject_id != out.subject_id) {
      throw Error(ErrorCode::kSubjectMismatch,
                  "cannot concatenate " + v.subject_id + " with " + out.subject_id);
    }
    out.values.insert(out.values.end(), v.values.begin(), v.values.end());
    out.blocks.insert(out.blocks.end(), v.blocks.begin(), v.blocks.end());
  }
  return out;
}

std::vector<std::string> feature_names(const DescriptorVector& layout, std::size_t nbins) {
  const std::size_t width = std::max<std::size_t>(2, std::to_string(nbins == 0 ? 0 : nbins - 1).size());
  const auto pad = [&](std::size_t i) {
    std::string s = std::to_string(i);
    return std::string(width - std::min(width, s.size()), '0') + s;
  };
  const std::size_t blocks = std::max<std::size_t>(1, layout.blocks.size());
  std::vector<std::string> names;
  for (std::size_t b = 0; b < blocks; ++b) {
    std::string prefix(to_string(layout.kind));
    if (layout.blocks.size() > 1) {
      prefix += "_" + std::string(to_string(layout.blocks[b].variable)) + "_" +
                std::string(to_string(layout.blocks[b].state));
    }
    for (int degree = 0; degree < 2; ++degree) {
      for (std::size_t i = 0; i < nbins; ++i) {
        names.push_back(prefix + "_H" + std::to_string(degree) + "_" + pad(i));
      }
    }
  }
  return names;
}

}  // namespace tdagait
