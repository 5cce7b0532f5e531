#pragma once
// Data-parallel inner loops of the pipeline.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2 variant picked at runtime. The AVX2 variants vectorize across the
// output index only and use the same operation order as the scalar code
// with no fused multiply-add, so both backends produce bit-identical
// results.

#include <cstddef>
#include <span>
#include <string_view>

namespace tdagait::kernels {

enum class Backend { kScalar, kAvx2 };

std::string_view backend_name(Backend backend);

/// True when the CPU and the build both support `backend`.
bool backend_available(Backend backend);

/// Backend used by the dispatching entry points below. Defaults to the best
/// available one; `TDAGAIT_SIMD=scalar` in the environment forces scalar.
Backend active_backend();
void set_active_backend(Backend backend);

/// Table of kernel entry points for one backend.
struct KernelTable {
  // out[j - first] = || p_i - p_j || for j in [first, n).
  // `coords` is column-major: coords[k * n + j] is coordinate k of point j.
  void (*distance_row)(std::span<const double> coords, std::size_t n,
                       std::size_t dim, std::size_t i, std::size_t first,
                       std::span<double> out);

  // out[t] += 1 for every t with birth <= grid[t] < death.
  void (*betti_accumulate)(double birth, double death,
                           std::span<const double> grid, std::span<double> out);

  // out[t] = max(0, min(grid[t] - birth, death - grid[t])).
  void (*tent_row)(double birth, double death, std::span<const double> grid,
                   std::span<double> out);

  // acc[t] = max(acc[t], tent(grid[t])).
  void (*tent_max)(double birth, double death, std::span<const double> grid,
                   std::span<double> acc);

  // acc[t] = acc[t] + weight * tent(grid[t]).
  void (*tent_weighted_add)(double birth, double death, double weight,
                            std::span<const double> grid, std::span<double> acc);
};

const KernelTable& table(Backend backend);

inline const KernelTable& active() { return table(active_backend()); }

namespace scalar {
extern const KernelTable kTable;
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
extern const KernelTable kTable;
}
#endif

}  // namespace tdagait::kernels
