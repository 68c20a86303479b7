// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; callers must gate on avx2_available() before dispatching here.

#include <immintrin.h>

#include "tsmpc/kernels.hpp"

namespace tsmpc::kernels {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    i += 4;
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4,
                     _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
  }
  if (i + 4 <= n) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    i += 4;
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_avx2(const double* a, std::size_t rows, std::size_t cols, std::size_t lda,
               const double* x, double* y) {
  std::size_t r = 0;
  // two rows per pass share the loads of x
  for (; r + 2 <= rows; r += 2) {
    const double* row0 = a + r * lda;
    const double* row1 = row0 + lda;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= cols; i += 4) {
      const __m256d xv = _mm256_loadu_pd(x + i);
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row0 + i), xv, acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row1 + i), xv, acc1);
    }
    double s0 = hsum(acc0);
    double s1 = hsum(acc1);
    for (; i < cols; ++i) {
      s0 += row0[i] * x[i];
      s1 += row1[i] * x[i];
    }
    y[r] = s0;
    y[r + 1] = s1;
  }
  if (r < rows) y[r] = dot_avx2(a + r * lda, x, cols);
}

void gemv_t_avx2(const double* a, std::size_t rows, std::size_t cols, std::size_t lda,
                 const double* x, double* y) {
  std::size_t c = 0;
  for (; c + 4 <= cols; c += 4) _mm256_storeu_pd(y + c, _mm256_setzero_pd());
  for (; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(x[r], a + r * lda, y, cols);
}

const Ops kAvx2Ops{"avx2", dot_avx2, axpy_avx2, gemv_avx2, gemv_t_avx2};

}  // namespace

const Ops& detail_avx2_ops() { return kAvx2Ops; }

}  // namespace tsmpc::kernels
