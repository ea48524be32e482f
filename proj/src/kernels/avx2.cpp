// SPDX-License-Identifier: Apache-2.0
//
// AVX2 + FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; nothing here may be called unless cpu_has_avx2_fma() holds.

#include <immintrin.h>

#include <cmath>

#include "kernel_impl.hpp"

namespace spreadcert::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

}  // namespace

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void affine_symv(const double* g, std::size_t n, double alpha, const double* x, double beta,
                 const double* b, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = alpha * dot(g + i * n, x, n) + beta * b[i];
  }
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  double r = hmax(m);
  for (; i < n; ++i) r = std::fmax(r, std::fabs(x[i] - y[i]));
  return r;
}

double edge_energy(const double* g, std::size_t n, const double* re, const double* im) {
  __m256d acc = _mm256_setzero_pd();
  double tail = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = g + i * n;
    const __m256d ri = _mm256_set1_pd(re[i]);
    const __m256d ii = _mm256_set1_pd(im != nullptr ? im[i] : 0.0);
    std::size_t j = i + 1;
    for (; j + 4 <= n; j += 4) {
      const __m256d dr = _mm256_sub_pd(ri, _mm256_loadu_pd(re + j));
      __m256d d2 = _mm256_mul_pd(dr, dr);
      if (im != nullptr) {
        const __m256d di = _mm256_sub_pd(ii, _mm256_loadu_pd(im + j));
        d2 = _mm256_fmadd_pd(di, di, d2);
      }
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), d2, acc);
    }
    for (; j < n; ++j) {
      const double dr = re[i] - re[j];
      double d2 = dr * dr;
      if (im != nullptr) {
        const double di = im[i] - im[j];
        d2 += di * di;
      }
      tail += row[j] * d2;
    }
  }
  return hsum(acc) + tail;
}

}  // namespace spreadcert::kernels::avx2
