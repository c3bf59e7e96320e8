#if defined(SUBDIFF_BUILD_NEON) && defined(__aarch64__)

#include <arm_neon.h>

#include <subdiff/kernels.hpp>

namespace subdiff::kernels::detail {

namespace {

void axpy_neon(double* y, const double* x, double a, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    vy = vfmaq_f64(vy, va, vld1q_f64(x + i));
    vst1q_f64(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void weighted_accum4_neon(double* y, const double* x0, const double* x1,
                          const double* x2, const double* x3, double a0,
                          double a1, double a2, double a3, std::size_t n) {
  const float64x2_t va0 = vdupq_n_f64(a0);
  const float64x2_t va1 = vdupq_n_f64(a1);
  const float64x2_t va2 = vdupq_n_f64(a2);
  const float64x2_t va3 = vdupq_n_f64(a3);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    vy = vfmaq_f64(vy, va0, vld1q_f64(x0 + i));
    vy = vfmaq_f64(vy, va1, vld1q_f64(x1 + i));
    vy = vfmaq_f64(vy, va2, vld1q_f64(x2 + i));
    vy = vfmaq_f64(vy, va3, vld1q_f64(x3 + i));
    vst1q_f64(y + i, vy);
  }
  for (; i < n; ++i)
    y[i] += a0 * x0[i] + a1 * x1[i] + a2 * x2[i] + a3 * x3[i];
}

void combine2_neon(double* out, const double* x, const double* y, double a,
                   double b, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vx = vmulq_f64(va, vld1q_f64(x + i));
    vst1q_f64(out + i, vfmaq_f64(vx, vb, vld1q_f64(y + i)));
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

extern const Ops neon_ops;
const Ops neon_ops = {axpy_neon, weighted_accum4_neon, combine2_neon, dot_neon};

}  // namespace subdiff::kernels::detail

#endif  // SUBDIFF_BUILD_NEON && __aarch64__
