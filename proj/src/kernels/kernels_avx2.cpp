// Compiled with -mavx2 -mno-fma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "tdagait/kernels.hpp"

namespace tdagait::kernels::avx2 {
namespace {

constexpr std::size_t kLanes = 4;

void distance_row(std::span<const double> coords, std::size_t n,
                  std::size_t dim, std::size_t i, std::size_t first,
                  std::span<double> out) {
  std::size_t j = first;
  for (; j + kLanes <= n; j += kLanes) {
    __m256d sum = _mm256_setzero_pd();
    for (std::size_t k = 0; k < dim; ++k) {
      const __m256d pi = _mm256_set1_pd(coords[k * n + i]);
      const __m256d pj = _mm256_loadu_pd(&coords[k * n + j]);
      const __m256d diff = _mm256_sub_pd(pi, pj);
      sum = _mm256_add_pd(sum, _mm256_mul_pd(diff, diff));
    }
    _mm256_storeu_pd(&out[j - first], _mm256_sqrt_pd(sum));
  }
  for (; j < n; ++j) {
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
  const __m256d b = _mm256_set1_pd(birth);
  const __m256d d = _mm256_set1_pd(death);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t t = 0;
  for (; t + kLanes <= grid.size(); t += kLanes) {
    const __m256d g = _mm256_loadu_pd(&grid[t]);
    const __m256d alive = _mm256_and_pd(_mm256_cmp_pd(b, g, _CMP_LE_OQ),
                                        _mm256_cmp_pd(g, d, _CMP_LT_OQ));
    const __m256d acc = _mm256_loadu_pd(&out[t]);
    _mm256_storeu_pd(&out[t], _mm256_add_pd(acc, _mm256_and_pd(alive, one)));
  }
  for (; t < grid.size(); ++t) {
    if (birth <= grid[t] && grid[t] < death) out[t] += 1.0;
  }
}

inline __m256d tent4(__m256d b, __m256d d, __m256d g) {
  const __m256d rise = _mm256_sub_pd(g, b);
  const __m256d fall = _mm256_sub_pd(d, g);
  // Operand order mirrors std::max(0.0, std::min(rise, fall)) on ties.
  return _mm256_max_pd(_mm256_min_pd(fall, rise), _mm256_setzero_pd());
}

inline double tent1(double birth, double death, double t) {
  return std::max(0.0, std::min(t - birth, death - t));
}

void tent_row(double birth, double death, std::span<const double> grid,
              std::span<double> out) {
  const __m256d b = _mm256_set1_pd(birth);
  const __m256d d = _mm256_set1_pd(death);
  std::size_t t = 0;
  for (; t + kLanes <= grid.size(); t += kLanes) {
    _mm256_storeu_pd(&out[t], tent4(b, d, _mm256_loadu_pd(&grid[t])));
  }
  for (; t < grid.size(); ++t) out[t] = tent1(birth, death, grid[t]);
}

void tent_max(double birth, double death, std::span<const double> grid,
              std::span<double> acc) {
  const __m256d b = _mm256_set1_pd(birth);
  const __m256d d = _mm256_set1_pd(death);
  std::size_t t = 0;
  for (; t + kLanes <= grid.size(); t += kLanes) {
    const __m256d cur = _mm256_loadu_pd(&acc[t]);
    // max(tent, cur) with cur as the second operand matches std::max(cur, tent)
    // for the non-NaN values produced here.
    _mm256_storeu_pd(&acc[t], _mm256_max_pd(tent4(b, d, _mm256_loadu_pd(&grid[t])), cur));
  }
  for (; t < grid.size(); ++t) acc[t] = std::max(acc[t], tent1(birth, death, grid[t]));
}

void tent_weighted_add(double birth, double death, double weight,
                       std::span<const double> grid, std::span<double> acc) {
  const __m256d b = _mm256_set1_pd(birth);
  const __m256d d = _mm256_set1_pd(death);
  const __m256d w = _mm256_set1_pd(weight);
  std::size_t t = 0;
  for (; t + kLanes <= grid.size(); t += kLanes) {
    const __m256d term = _mm256_mul_pd(w, tent4(b, d, _mm256_loadu_pd(&grid[t])));
    _mm256_storeu_pd(&acc[t], _mm256_add_pd(_mm256_loadu_pd(&acc[t]), term));
  }
  for (; t < grid.size(); ++t) {
    const double term = weight * tent1(birth, death, grid[t]);
    acc[t] = acc[t] + term;
  }
}

}  // namespace

const KernelTable kTable{&distance_row, &betti_accumulate, &tent_row, &tent_max,
                         &tent_weighted_add};

}  // namespace tdagait::kernels::avx2
