#include <subdiff/cq_weights.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace subdiff {

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("fractional order beta must lie in (0,1), got " +
                                std::to_string(beta));
}

}  // namespace

std::vector<double> cq_weights(double beta, int count) {
  check_beta(beta);
  if (count < 0)
    throw std::invalid_argument("weight count must be non-negative");
  std::vector<double> w(count + 1);
  w[0] = 1.0;
  // varpi_k = varpi_{k-1} (k - 1 - beta) / k: the ratio of consecutive
  // binomial coefficients of (1-z)^beta.
  for (int k = 1; k <= count; ++k) w[k] = w[k - 1] * (k - 1.0 - beta) / k;
  return w;
}

std::vector<double> inverse_weights(double beta, int count) {
  check_beta(beta);
  if (count < 0)
    throw std::invalid_argument("weight count must be non-negative");
  std::vector<double> r(count + 1);
  r[0] = 1.0;
  for (int k = 1; k <= count; ++k) r[k] = r[k - 1] * (k - 1.0 + beta) / k;
  return r;
}

std::vector<double> partial_sums(const std::vector<double>& varpi) {
  if (varpi.empty())
    throw std::invalid_argument("partial_sums: empty weight sequence");
  std::vector<double> b(varpi.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < varpi.size(); ++k) {
    acc += varpi[k];
    b[k] = acc;
  }
  return b;
}

CoefficientTable::CoefficientTable(double beta_, double tau_, int n_steps) {
  check_beta(beta_);
  if (!(tau_ > 0.0))
    throw std::invalid_argument("time step tau must be positive");
  if (n_steps < 1)
    throw std::invalid_argument("coefficient table needs at least one step");
  beta = beta_;
  tau = tau_;
  varpi = cq_weights(beta_, n_steps);
  varrho = inverse_weights(beta_, n_steps);
  b = partial_sums(varpi);
}

double gronwall_kernel(const CoefficientTable& table, int m) {
  if (m < 0 || m > table.n_steps())
    throw std::invalid_argument("gronwall_kernel: index " + std::to_string(m) +
                                " outside table of size " +
                                std::to_string(table.n_steps()));
  return std::pow(table.tau, table.beta) * table.varrho[m];
}

double kernel_sum_closed_form(double beta, int k) {
  check_beta(beta);
  if (k < 1)
    throw std::invalid_argument("kernel_sum_closed_form: k must be >= 1");
  // Extended precision: lgamma(k) grows like k log k, so double log-Gamma
  // would already lose ~1e-12 of the quotient by k ~ 500.
  return static_cast<double>(
      std::exp(std::lgamma(k + static_cast<long double>(beta)) -
               std::lgamma(1.0L + beta) -
               std::lgamma(static_cast<long double>(k))));
}

}  // namespace subdiff
