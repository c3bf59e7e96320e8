#include <subdiff/mittag_leffler.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace subdiff {

double mlf_eval(const MittagLefflerParams& params, double z) {
  if (!(params.beta > 0.0 && params.beta <= 1.0))
    throw std::invalid_argument("mlf_eval: beta must lie in (0,1], got " +
                                std::to_string(params.beta));
  if (!(params.rel_tol >= std::numeric_limits<double>::epsilon()))
    throw std::invalid_argument(
        "mlf_eval: rel_tol must be at least machine epsilon");
  if (params.max_terms < 10)
    throw std::invalid_argument("mlf_eval: max_terms must be at least 10");
  if (z < 0.0) throw std::domain_error("mlf_eval: z must be non-negative");
  if (z == 0.0) return 1.0;

  // All terms are positive for z > 0, so the running sum is monotone and the
  // relative stopping rule is safe.
  const double logz = std::log(z);
  double sum = 0.0;
  for (int l = 0; l < params.max_terms; ++l) {
    const double term = std::exp(l * logz - std::lgamma(1.0 + l * params.beta));
    sum += term;
    if (!std::isfinite(sum))
      throw std::runtime_error(
          "mlf_eval: series overflowed before converging (z too large)");
    if (term <= params.rel_tol * sum) return sum;
  }
  throw std::runtime_error("mlf_eval: series did not converge within " +
                           std::to_string(params.max_terms) + " terms");
}

}  // namespace subdiff
