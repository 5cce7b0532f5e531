#pragma once
// Fixed-length vectorizations of persistence diagrams: Betti curves,
// persistence landscapes and power-weighted silhouettes.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <optional>
#include <vector>

#include "tdagait/homology.hpp"
#include "tdagait/ingest.hpp"

namespace tdagait {

enum class DescriptorKind { kBettiCurve, kLandscape, kSilhouette };

std::string_view to_string(DescriptorKind kind);  // "BC", "PL", "SL"
std::optional<DescriptorKind> parse_descriptor_kind(std::string_view text);

/// nbins evenly spaced sample points from t_min to t_max inclusive.
/// An `empty` grid comes from a degree with no pairs; every descriptor
/// evaluated on it is zero.
struct SamplingGrid {
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t nbins = 25;
  int degree = 0;
  bool empty = false;

  std::vector<double> points() const;
  bool operator==(const SamplingGrid&) const = default;
};

/// Spans the smallest birth and largest death at `degree` over all
/// `diagrams`. Diagrams must already be capped.
SamplingGrid fit_grid(std::span<const PersistenceDiagram> diagrams, int degree,
                      std::size_t nbins);

// Single-degree blocks of length grid.nbins. The diagram's pairs at
// grid.degree are used; pairs at other degrees are ignored.
std::vector<double> betti_curve(const PersistenceDiagram& dgm, const SamplingGrid& grid);
std::vector<double> landscape(const PersistenceDiagram& dgm, const SamplingGrid& grid,
                              std::size_t layer = 1);
std::vector<double> silhouette(const PersistenceDiagram& dgm, const SamplingGrid& grid,
                               double power = 1.0);

struct DescriptorParams {
  DescriptorKind kind = DescriptorKind::kBettiCurve;
  std::size_t nbins = 25;
  std::size_t layer = 1;
  double silhouette_power = 1.0;
};

struct VectorBlock {
  Variable variable;
  State state;
};

struct DescriptorVector {
  DescriptorKind kind = DescriptorKind::kBettiCurve;
  std::vector<double> values;
  std::string subject_id;
  std::vector<VectorBlock> blocks;  // one per (variable, state), in value order
};

/// H0 block followed by H1 block. `grids[k]` must have degree k.
DescriptorVector vectorize(const PersistenceDiagram& dgm, std::span<const SamplingGrid> grids,
                           const DescriptorParams& params);

/// Concatenates in order. All inputs must share kind and subject.
DescriptorVector concat_variables(std::span<const DescriptorVector> vectors);

/// Column names `BC_H0_00` ... for a single block, `BC_MinTC_Off_H0_00` ...
/// when several blocks are concatenated.
std::vector<std::string> feature_names(const DescriptorVector& layout, std::size_t nbins);

}  // namespace tdagait
