#include "pmg/kernels.hpp"

namespace pmg::kernels {

void contract_scalar(const double* matrix, int m, int n, const double* in, double* out,
                     std::size_t pre, std::size_t post, bool accumulate) {
  const std::size_t in_stride = static_cast<std::size_t>(n) * pre;
  const std::size_t out_stride = static_cast<std::size_t>(m) * pre;
  for (std::size_t s = 0; s < post; ++s) {
    const double* src = in + s * in_stride;
    double* dst = out + s * out_stride;
    for (int a = 0; a < m; ++a) {
      double* row_out = dst + a * pre;
      const double* row_m = matrix + static_cast<std::size_t>(a) * n;
      if (!accumulate)
        for (std::size_t i = 0; i < pre; ++i) row_out[i] = 0.0;
      for (int b = 0; b < n; ++b) {
        const double w = row_m[b];
        const double* row_in = src + b * pre;
        for (std::size_t i = 0; i < pre; ++i) row_out[i] += w * row_in[i];
      }
    }
  }
}

}  // namespace pmg::kernels
