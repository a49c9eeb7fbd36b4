#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "pmg/kernels.hpp"

namespace pmg::kernels {

namespace {

using ContractFn = void (*)(const double*, int, int, const double*, double*, std::size_t,
                            std::size_t, bool);

bool cpu_has_avx2() {
#if defined(PMG_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

ContractFn function_for(Backend b) {
#if defined(PMG_HAVE_AVX2)
  if (b == Backend::avx2) return &contract_avx2;
#endif
  (void)b;
  return &contract_scalar;
}

Backend default_backend() {
  if (const char* env = std::getenv("PMG_KERNEL")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && backend_supported(Backend::avx2)) return Backend::avx2;
  }
  return backend_supported(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

struct State {
  std::atomic<Backend> backend{default_backend()};
  std::atomic<ContractFn> fn{function_for(backend.load())};
};

State& state() {
  static State s;
  return s;
}

thread_local std::uint64_t flop_counter = 0;

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "unknown";
}

bool backend_supported(Backend b) {
  if (b == Backend::scalar) return true;
  static const bool avx2 = cpu_has_avx2();
  return avx2;
}

Backend active_backend() { return state().backend.load(); }

void set_backend(Backend b) {
  if (!backend_supported(b))
    throw std::invalid_argument("kernel backend not supported: " + std::string(backend_name(b)));
  state().backend.store(b);
  state().fn.store(function_for(b));
}

void contract(const double* matrix, int m, int n, const double* in, double* out,
              std::size_t pre, std::size_t post, bool accumulate) {
  flop_counter += 2ull * static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(n) * pre * post;
  state().fn.load(std::memory_order_relaxed)(matrix, m, n, in, out, pre, post, accumulate);
}

namespace flops {
std::uint64_t count() { return flop_counter; }
void reset() { flop_counter = 0; }
void add(std::uint64_t n) { flop_counter += n; }
}  // namespace flops

}  // namespace pmg::kernels
