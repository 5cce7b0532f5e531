#include <algorithm>
#include <cmath>

#include "tdagait/kernels.hpp"

namespace tdagait::kernels::scalar {
namespace {

void distance_row(std::span<const double> coords, std::size_t n,
                  std::size_t dim, std::size_t i, std::size_t first,
                  std::span<double> out) {
  for (std::size_t j = first; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double diff = coords[k * n + i] - coords[k * n + j];
      const double sq = diff * diff;
      sum = sum + sq;
    }
    out[j - first] = std::sqrt(sum);
  }
}

void betti_accumulate(double birth, double death, std::span<const double> grid,
                      std::span<double> out) {
  for (std::size_t t = 0; t < grid.size(); ++t) {
    if (birth <= grid[t] && grid[t] < death) out[t] += 1.0;
  }
}

inline double tent(double birth, double death, double t) {
  return std::max(0.0, std::min(t - birth, death - t));
}

void tent_row(double birth, double death, std::span<const double> grid,
              std::span<double> out) {
  for (std::size_t t = 0; t < grid.size(); ++t) out[t] = tent(birth, death, grid[t]);
}

void tent_max(double birth, double death, std::span<const double> grid,
              std::span<double> acc) {
  for (std::size_t t = 0; t < grid.size(); ++t) {
    acc[t] = std::max(acc[t], tent(birth, death, grid[t]));
  }
}

void tent_weighted_add(double birth, double death, double weight,
                       std::span<const double> grid, std::span<double> acc) {
  for (std::size_t t = 0; t < grid.size(); ++t) {
    const double term = weight * tent(birth, death, grid[t]);
    acc[t] = acc[t] + term;
  }
}

}  // namespace

const KernelTable kTable{&distance_row, &betti_accumulate, &tent_row, &tent_max,
                         &tent_weighted_add};

}  // namespace tdagait::kernels::scalar
