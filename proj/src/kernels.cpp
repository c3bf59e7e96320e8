#include <subdiff/kernels.hpp>

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace subdiff::kernels {

namespace detail {
extern const Ops scalar_ops;
#if defined(SUBDIFF_BUILD_AVX2) && defined(__x86_64__)
extern const Ops avx2_ops;
#endif
#if defined(SUBDIFF_BUILD_NEON) && defined(__aarch64__)
extern const Ops neon_ops;
#endif
}  // namespace detail

namespace {

bool cpu_has(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(SUBDIFF_BUILD_AVX2) && defined(__x86_64__)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(SUBDIFF_BUILD_NEON) && defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend detect_backend() {
  if (const char* env = std::getenv("SUBDIFF_KERNEL_BACKEND")) {
    const std::string v(env);
    Backend b;
    if (v == "scalar")
      b = Backend::Scalar;
    else if (v == "avx2")
      b = Backend::Avx2;
    else if (v == "neon")
      b = Backend::Neon;
    else
      throw std::invalid_argument("SUBDIFF_KERNEL_BACKEND: unknown backend '" +
                                  v + "'");
    if (!cpu_has(b))
      throw std::invalid_argument(std::string("SUBDIFF_KERNEL_BACKEND: '") +
                                  backend_name(b) +
                                  "' is not available on this host");
    return b;
  }
  if (cpu_has(Backend::Avx2)) return Backend::Avx2;
  if (cpu_has(Backend::Neon)) return Backend::Neon;
  return Backend::Scalar;
}

struct State {
  Backend backend;
  const detail::Ops* ops;
};

State make_state(Backend b) {
  return State{b, &detail::ops_for(b)};
}

State& state() {
  static State s = make_state(detect_backend());
  return s;
}

}  // namespace

namespace detail {

const Ops& ops_for(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return scalar_ops;
    case Backend::Avx2:
#if defined(SUBDIFF_BUILD_AVX2) && defined(__x86_64__)
      if (cpu_has(Backend::Avx2)) return avx2_ops;
#endif
      break;
    case Backend::Neon:
#if defined(SUBDIFF_BUILD_NEON) && defined(__aarch64__)
      return neon_ops;
#endif
      break;
  }
  throw std::invalid_argument(std::string("kernel backend '") +
                              backend_name(b) +
                              "' is not available on this host");
}

}  // namespace detail

Backend active_backend() { return state().backend; }

void set_backend(Backend b) { state() = make_state(b); }

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "?";
}

bool backend_available(Backend b) { return cpu_has(b); }

void axpy(double* y, const double* x, double a, std::size_t n) {
  state().ops->axpy(y, x, a, n);
}

void weighted_accum4(double* y, const double* x0, const double* x1,
                     const double* x2, const double* x3, double a0, double a1,
                     double a2, double a3, std::size_t n) {
  state().ops->weighted_accum4(y, x0, x1, x2, x3, a0, a1, a2, a3, n);
}

void combine2(double* out, const double* x, const double* y, double a,
              double b, std::size_t n) {
  state().ops->combine2(out, x, y, a, b, n);
}

double dot(const double* x, const double* y, std::size_t n) {
  return state().ops->dot(x, y, n);
}

}  // namespace subdiff::kernels
