#if defined(SUBDIFF_BUILD_AVX2) && defined(__x86_64__)

#include <immintrin.h>

#include <subdiff/kernels.hpp>

namespace subdiff::kernels::detail {

namespace {

void axpy_avx2(double* y, const double* x, double a, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void weighted_accum4_avx2(double* y, const double* x0, const double* x1,
                          const double* x2, const double* x3, double a0,
                          double a1, double a2, double a3, std::size_t n) {
  const __m256d va0 = _mm256_set1_pd(a0);
  const __m256d va1 = _mm256_set1_pd(a1);
  const __m256d va2 = _mm256_set1_pd(a2);
  const __m256d va3 = _mm256_set1_pd(a3);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va0, _mm256_loadu_pd(x0 + i), vy);
    vy = _mm256_fmadd_pd(va1, _mm256_loadu_pd(x1 + i), vy);
    vy = _mm256_fmadd_pd(va2, _mm256_loadu_pd(x2 + i), vy);
    vy = _mm256_fmadd_pd(va3, _mm256_loadu_pd(x3 + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i)
    y[i] += a0 * x0[i] + a1 * x1[i] + a2 * x2[i] + a3 * x3[i];
}

void combine2_avx2(double* out, const double* x, const double* y, double a,
                   double b, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), vx));
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  acc0 = _mm256_add_pd(acc0, acc1);
  __m128d lo = _mm256_castpd256_pd128(acc0);
  __m128d hi = _mm256_extractf128_pd(acc0, 1);
  lo = _mm_add_pd(lo, hi);
  double s = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

extern const Ops avx2_ops;
const Ops avx2_ops = {axpy_avx2, weighted_accum4_avx2, combine2_avx2, dot_avx2};

}  // namespace subdiff::kernels::detail

#endif  // SUBDIFF_BUILD_AVX2 && __x86_64__
