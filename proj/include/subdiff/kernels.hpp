#pragma once

#include <cstddef>

namespace subdiff::kernels {

enum class Backend { Scalar, Avx2, Neon };

// The active backend is chosen once from CPU features (overridable via the
// SUBDIFF_KERNEL_BACKEND environment variable: "scalar", "avx2", "neon").
Backend active_backend();

// Force a backend. Throws std::invalid_argument if it is not available on
// this host or was not compiled in.
void set_backend(Backend b);

const char* backend_name(Backend b);
bool backend_available(Backend b);

// y[i] += a * x[i]
void axpy(double* y, const double* x, double a, std::size_t n);

// y[i] += a0*x0[i] + a1*x1[i] + a2*x2[i] + a3*x3[i]
// Fused block of four weighted accumulations; the workhorse of the CQ
// history convolution sum_j w_{k-j} u^j.
void weighted_accum4(double* y, const double* x0, const double* x1,
                     const double* x2, const double* x3, double a0, double a1,
                     double a2, double a3, std::size_t n);

// out[i] = a*x[i] + b*y[i]
void combine2(double* out, const double* x, const double* y, double a,
              double b, std::size_t n);

double dot(const double* x, const double* y, std::size_t n);

namespace detail {

// Per-backend entry points, exposed so equivalence tests can pit the SIMD
// paths against the scalar reference directly.
struct Ops {
  void (*axpy)(double*, const double*, double, std::size_t);
  void (*weighted_accum4)(double*, const double*, const double*, const double*,
                          const double*, double, double, double, double,
                          std::size_t);
  void (*combine2)(double*, const double*, const double*, double, double,
                   std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
};

const Ops& ops_for(Backend b);  // throws std::invalid_argument if unavailable

}  // namespace detail

}  // namespace subdiff::kernels
