#include <atomic>
#include <cstdlib>
#include <string>

#include "tdagait/kernels.hpp"

namespace tdagait::kernels {
namespace {

#if defined(__x86_64__) || defined(_M_X64)
constexpr bool kBuiltWithAvx2 = true;
#else
constexpr bool kBuiltWithAvx2 = false;
#endif

Backend detect() {
  if (const char* env = std::getenv("TDAGAIT_SIMD")) {
    if (std::string(env) == "scalar") return Backend::kScalar;
  }
  return backend_available(Backend::kAvx2) ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

std::string_view backend_name(Backend backend) {
  return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

bool backend_available(Backend backend) {
  if (backend == Backend::kScalar) return true;
  if constexpr (kBuiltWithAvx2) {
#if defined(__GNUC__) || defined(__clang__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
  }
  return false;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_active_backend(Backend backend) {
  if (!backend_available(backend)) backend = Backend::kScalar;
  current().store(backend, std::memory_order_relaxed);
}

const KernelTable& table(Backend backend) {
#if defined(__x86_64__) || defined(_M_X64)
  if (backend == Backend::kAvx2) return avx2::kTable;
#endif
  return scalar::kTable;
}

}  // namespace tdagait::kernels
