// Compiled with -mavx2 -mfma; only called after a CPUID check.

#include <immintrin.h>

#include <vector>

#include "pmg/kernels.hpp"

namespace pmg::kernels {

namespace {

// pre == 1: out[s][a] = sum_b M[a][b] in[s][b]. Vectorized over a using the
// transposed matrix, broadcasting in[s][b].
void contract_first_axis(const double* matrix, int m, int n, const double* in, double* out,
                         std::size_t post, bool accumulate) {
  thread_local std::vector<double> mt;
  mt.resize(static_cast<std::size_t>(m) * n);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < n; ++b) mt[static_cast<std::size_t>(b) * m + a] = matrix[a * n + b];
  const double* t = mt.data();

  for (std::size_t s = 0; s < post; ++s) {
    const double* src = in + s * n;
    double* dst = out + s * m;
    int a = 0;
    for (; a + 16 <= m; a += 16) {
      __m256d c0 = accumulate ? _mm256_loadu_pd(dst + a) : _mm256_setzero_pd();
      __m256d c1 = accumulate ? _mm256_loadu_pd(dst + a + 4) : _mm256_setzero_pd();
      __m256d c2 = accumulate ? _mm256_loadu_pd(dst + a + 8) : _mm256_setzero_pd();
      __m256d c3 = accumulate ? _mm256_loadu_pd(dst + a + 12) : _mm256_setzero_pd();
      for (int b = 0; b < n; ++b) {
        const __m256d x = _mm256_broadcast_sd(src + b);
        const double* row = t + static_cast<std::size_t>(b) * m + a;
        c0 = _mm256_fmadd_pd(x, _mm256_loadu_pd(row), c0);
        c1 = _mm256_fmadd_pd(x, _mm256_loadu_pd(row + 4), c1);
        c2 = _mm256_fmadd_pd(x, _mm256_loadu_pd(row + 8), c2);
        c3 = _mm256_fmadd_pd(x, _mm256_loadu_pd(row + 12), c3);
      }
      _mm256_storeu_pd(dst + a, c0);
      _mm256_storeu_pd(dst + a + 4, c1);
      _mm256_storeu_pd(dst + a + 8, c2);
      _mm256_storeu_pd(dst + a + 12, c3);
    }
    for (; a + 4 <= m; a += 4) {
      __m256d c0 = accumulate ? _mm256_loadu_pd(dst + a) : _mm256_setzero_pd();
      for (int b = 0; b < n; ++b)
        c0 = _mm256_fmadd_pd(_mm256_broadcast_sd(src + b),
                             _mm256_loadu_pd(t + static_cast<std::size_t>(b) * m + a), c0);
      _mm256_storeu_pd(dst + a, c0);
    }
    for (; a < m; ++a) {
      double sum = accumulate ? dst[a] : 0.0;
      for (int b = 0; b < n; ++b) sum += matrix[a * n + b] * src[b];
      dst[a] = sum;
    }
  }
}

// pre >= 4: vectorized over the contiguous pre axis, two output rows per pass.
void contract_inner_axis(const double* matrix, int m, int n, const double* in, double* out,
                         std::size_t pre, std::size_t post, bool accumulate) {
  const std::size_t in_stride = static_cast<std::size_t>(n) * pre;
  const std::size_t out_stride = static_cast<std::size_t>(m) * pre;
  for (std::size_t s = 0; s < post; ++s) {
    const double* src = in + s * in_stride;
    double* dst = out + s * out_stride;
    int a = 0;
    for (; a + 2 <= m; a += 2) {
      const double* m0 = matrix + static_cast<std::size_t>(a) * n;
      const double* m1 = m0 + n;
      double* o0 = dst + a * pre;
      double* o1 = o0 + pre;
      std::size_t i = 0;
      for (; i + 8 <= pre; i += 8) {
        __m256d c00 = accumulate ? _mm256_loadu_pd(o0 + i) : _mm256_setzero_pd();
        __m256d c01 = accumulate ? _mm256_loadu_pd(o0 + i + 4) : _mm256_setzero_pd();
        __m256d c10 = accumulate ? _mm256_loadu_pd(o1 + i) : _mm256_setzero_pd();
        __m256d c11 = accumulate ? _mm256_loadu_pd(o1 + i + 4) : _mm256_setzero_pd();
        for (int b = 0; b < n; ++b) {
          const double* x = src + b * pre + i;
          const __m256d x0 = _mm256_loadu_pd(x);
          const __m256d x1 = _mm256_loadu_pd(x + 4);
          const __m256d w0 = _mm256_broadcast_sd(m0 + b);
          const __m256d w1 = _mm256_broadcast_sd(m1 + b);
          c00 = _mm256_fmadd_pd(w0, x0, c00);
          c01 = _mm256_fmadd_pd(w0, x1, c01);
          c10 = _mm256_fmadd_pd(w1, x0, c10);
          c11 = _mm256_fmadd_pd(w1, x1, c11);
        }
        _mm256_storeu_pd(o0 + i, c00);
        _mm256_storeu_pd(o0 + i + 4, c01);
        _mm256_storeu_pd(o1 + i, c10);
        _mm256_storeu_pd(o1 + i + 4, c11);
      }
      for (; i + 4 <= pre; i += 4) {
        __m256d c0 = accumulate ? _mm256_loadu_pd(o0 + i) : _mm256_setzero_pd();
        __m256d c1 = accumulate ? _mm256_loadu_pd(o1 + i) : _mm256_setzero_pd();
        for (int b = 0; b < n; ++b) {
          const __m256d x0 = _mm256_loadu_pd(src + b * pre + i);
          c0 = _mm256_fmadd_pd(_mm256_broadcast_sd(m0 + b), x0, c0);
          c1 = _mm256_fmadd_pd(_mm256_broadcast_sd(m1 + b), x0, c1);
        }
        _mm256_storeu_pd(o0 + i, c0);
        _mm256_storeu_pd(o1 + i, c1);
      }
      for (; i < pre; ++i) {
        double s0 = accumulate ? o0[i] : 0.0;
        double s1 = accumulate ? o1[i] : 0.0;
        for (int b = 0; b < n; ++b) {
          s0 += m0[b] * src[b * pre + i];
          s1 += m1[b] * src[b * pre + i];
        }
        o0[i] = s0;
        o1[i] = s1;
      }
    }
    if (a < m) {
      const double* m0 = matrix + static_cast<std::size_t>(a) * n;
      double* o0 = dst + a * pre;
      std::size_t i = 0;
      for (; i + 4 <= pre; i += 4) {
        __m256d c0 = accumulate ? _mm256_loadu_pd(o0 + i) : _mm256_setzero_pd();
        for (int b = 0; b < n; ++b)
          c0 = _mm256_fmadd_pd(_mm256_broadcast_sd(m0 + b), _mm256_loadu_pd(src + b * pre + i), c0);
        _mm256_storeu_pd(o0 + i, c0);
      }
      for (; i < pre; ++i) {
        double s0 = accumulate ? o0[i] : 0.0;
        for (int b = 0; b < n; ++b) s0 += m0[b] * src[b * pre + i];
        o0[i] = s0;
      }
    }
  }
}

}  // namespace

void contract_avx2(const double* matrix, int m, int n, const double* in, double* out,
                   std::size_t pre, std::size_t post, bool accumulate) {
  if (pre == 1)
    contract_first_axis(matrix, m, n, in, out, post, accumulate);
  else if (pre >= 4)
    contract_inner_axis(matrix, m, n, in, out, pre, post, accumulate);
  else
    contract_scalar(matrix, m, n, in, out, pre, post, accumulate);
}

}  // namespace pmg::kernels
