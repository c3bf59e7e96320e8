#include <subdiff/kernels.hpp>

namespace subdiff::kernels::detail {

namespace {

void axpy_scalar(double* y, const double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void weighted_accum4_scalar(double* y, const double* x0, const double* x1,
                            const double* x2, const double* x3, double a0,
                            double a1, double a2, double a3, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    y[i] += a0 * x0[i] + a1 * x1[i] + a2 * x2[i] + a3 * x3[i];
}

void combine2_scalar(double* out, const double* x, const double* y, double a,
                     double b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

extern const Ops scalar_ops;
const Ops scalar_ops = {axpy_scalar, weighted_accum4_scalar, combine2_scalar,
                        dot_scalar};

}  // namespace subdiff::kernels::detail
