#pragma once

#include <vector>

namespace subdiff {

// Convolution-quadrature weights varpi_j of the generating function
// (1-z)^beta, j = 0..count. varpi_0 = 1 and the tail is negative and
// increasing toward zero.
std::vector<double> cq_weights(double beta, int count);

// Coefficients varrho_j of (1-z)^{-beta}: positive, decreasing, with
// varrho_j <= j^{beta-1}. Discrete inverse kernel of the varpi family.
std::vector<double> inverse_weights(double beta, int count);

// b_k = sum_{j<=k} varpi_j; the weight multiplying the initial value in the
// history form of the discrete fractional derivative.
std::vector<double> partial_sums(const std::vector<double>& varpi);

// All weight families for a fixed time grid, built once per run and then
// treated as immutable.
struct CoefficientTable {
  double beta = 0.0;
  double tau = 0.0;
  std::vector<double> varpi;   // length n_steps()+1
  std::vector<double> varrho;  // length n_steps()+1
  std::vector<double> b;       // length n_steps()+1

  CoefficientTable(double beta, double tau, int n_steps);
  int n_steps() const { return static_cast<int>(varpi.size()) - 1; }
};

// P_m = tau^beta * varrho_m, the discrete kernel that inverts the CQ
// operator in the Gronwall argument.
double gronwall_kernel(const CoefficientTable& table, int m);

// sum_{j=0}^{k-1} varrho_j = Gamma(k+beta) / (Gamma(1+beta) Gamma(k)),
// evaluated through log-Gamma for stability at large k.
double kernel_sum_closed_form(double beta, int k);

}  // namespace subdiff
