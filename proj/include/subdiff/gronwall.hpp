#pragma once

#include <vector>

#include <subdiff/cq_weights.hpp>

namespace subdiff {

// A concrete instance of the discrete fractional Gronwall inequality:
// non-negative sequences v satisfying
//   D_tau^beta (v^k)^2 <= sum_{l=1}^k lambda_{k-l} (v^l)^2 + v^{k-theta} g^{k-theta}
// are bounded by 2 E_beta(2 lambda t_k^beta) (v^0 + max_m sum_j P_{m-j} g^{j-theta}).
struct GronwallScenario {
  double beta = 0.5;
  double tau = 0.1;
  int n_steps = 0;
  std::vector<double> lambdas;  // lambda_0..; non-negative; missing entries = 0
  double lambda_bound = 0.0;    // lambda >= sum of lambdas
  std::vector<double> g;        // g^0..g^{n_steps}; non-negative
  double theta = 0.0;           // in [0,1]; x^{k-theta} = (1-theta)x^k + theta x^{k-1}
  double v0 = 0.0;
  bool first_power = false;     // linear variant: D v^k <= sum lambda v^l + g^k
};

struct GronwallResult {
  std::vector<double> v;      // constructed extremal sequence, v^0..v^{n_steps}
  std::vector<double> bound;  // Gronwall envelope at each step
  bool violated = false;
};

// Max over k of |sum_{m=0}^k P_{k-m} D_tau^beta (v^m)^2 - ((v^k)^2 - (v^0)^2)|.
// The telescoping identity makes this zero in exact arithmetic for any v.
double verify_kernel_identity(const CoefficientTable& table,
                              const std::vector<double>& v);

// Min over 1 <= k <= n_steps of
//   E_beta(mu t_k^beta) - 1 - mu sum_{j=0}^{k-1} P_{k-j} E_beta(mu t_j^beta);
// non-negative up to rounding.
double verify_lemma_2_3(double beta, double mu, double tau, int n_steps);

// Builds the equality-saturated sequence (the extremal admissible v) and
// checks it against the bound. Throws std::invalid_argument for inadmissible
// scenarios, std::runtime_error if the per-step quadratic has no non-negative
// root.
GronwallResult run_gronwall_scenario(const GronwallScenario& s);

}  // namespace subdiff
