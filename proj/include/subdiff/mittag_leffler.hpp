#pragma once

namespace subdiff {

struct MittagLefflerParams {
  double beta = 0.5;       // order, in (0, 1]
  double rel_tol = 1e-14;  // series termination: |term| <= rel_tol * |sum|
  int max_terms = 2000;
};

// E_beta(z) = sum_l z^l / Gamma(1 + l*beta) for z >= 0, by direct summation
// with log-Gamma terms. Throws std::domain_error for z < 0,
// std::invalid_argument for bad params, std::runtime_error if the series
// fails to converge within max_terms.
double mlf_eval(const MittagLefflerParams& params, double z);

}  // namespace subdiff
