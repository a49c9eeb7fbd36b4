#pragma once

// One-dimensional tensor contraction kernels. A scalar reference
// implementation is always built; an AVX2/FMA variant is compiled when the
// toolchain supports it and is selected at runtime from CPUID. The variants
// agree to rounding (FMA changes the last bits), never bitwise.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace pmg::kernels {

enum class Backend { scalar, avx2 };

std::string_view backend_name(Backend b);

/// True if the backend was compiled in and the CPU can run it.
bool backend_supported(Backend b);

/// Backend used by contract(). Defaults to the widest supported one; the
/// environment variable PMG_KERNEL=scalar|avx2 overrides the default.
Backend active_backend();

/// Throws std::invalid_argument if the backend is not supported.
void set_backend(Backend b);

/// Contracts a row-major m x n matrix with the middle axis of a tensor laid
/// out as [post][n][pre] (pre fastest):
///
///   out[s][a][i] (+)= sum_b matrix[a*n + b] * in[s][b][i]
///
/// `in` and `out` must not alias.
void contract(const double* matrix, int m, int n, const double* in, double* out,
              std::size_t pre, std::size_t post, bool accumulate);

// Backend entry points, exposed for equivalence tests.
void contract_scalar(const double* matrix, int m, int n, const double* in, double* out,
                     std::size_t pre, std::size_t post, bool accumulate);
#if defined(PMG_HAVE_AVX2)
void contract_avx2(const double* matrix, int m, int n, const double* in, double* out,
                   std::size_t pre, std::size_t post, bool accumulate);
#endif

/// Per-thread floating point operation counter. Every contraction adds
/// 2*m*n*pre*post; other kernels add their own counts via add().
namespace flops {
std::uint64_t count();
void reset();
void add(std::uint64_t n);
}  // namespace flops

}  // namespace pmg::kernels
