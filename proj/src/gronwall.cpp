#include <subdiff/gronwall.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <subdiff/mittag_leffler.hpp>

namespace subdiff {

namespace {

double lambda_at(const GronwallScenario& s, int idx) {
  return idx < static_cast<int>(s.lambdas.size()) ? s.lambdas[idx] : 0.0;
}

double g_at(const GronwallScenario& s, int idx) {
  if (idx < 0) idx = 0;  // g^{-theta} term of the bound clamps to g^0
  return idx < static_cast<int>(s.g.size()) ? s.g[idx] : 0.0;
}

void validate(const GronwallScenario& s) {
  if (!(s.beta > 0.0 && s.beta < 1.0))
    throw std::invalid_argument("gronwall scenario: beta must lie in (0,1)");
  if (!(s.tau > 0.0))
    throw std::invalid_argument("gronwall scenario: tau must be positive");
  if (s.n_steps < 1)
    throw std::invalid_argument("gronwall scenario: n_steps must be >= 1");
  if (!(s.theta >= 0.0 && s.theta <= 1.0))
    throw std::invalid_argument("gronwall scenario: theta must lie in [0,1]");
  if (!(s.v0 >= 0.0))
    throw std::invalid_argument("gronwall scenario: v0 must be non-negative");
  double sum = 0.0;
  for (double l : s.lambdas) {
    if (l < 0.0)
      throw std::invalid_argument(
          "gronwall scenario: lambdas must be non-negative");
    sum += l;
  }
  for (double gv : s.g)
    if (gv < 0.0)
      throw std::invalid_argument("gronwall scenario: g must be non-negative");
  if (s.lambda_bound < sum - 1e-12)
    throw std::invalid_argument(
        "gronwall scenario: lambda_bound must dominate sum of lambdas");
  if (s.lambda_bound > 0.0) {
    const double tau_max =
        std::pow(2.0 * s.lambda_bound * (1.0 + s.beta), -1.0 / s.beta);
    if (s.tau > tau_max * (1.0 + 1e-12))
      throw std::invalid_argument(
          "gronwall scenario: tau violates the step-size restriction "
          "(2*lambda*(1+beta))^{-1/beta} = " +
          std::to_string(tau_max));
  }
}

}  // namespace

double verify_kernel_identity(const CoefficientTable& table,
                              const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const int K =
      std::min<int>(static_cast<int>(v.size()) - 1, table.n_steps());
  const double ct = std::pow(table.tau, -table.beta);
  const double pb = std::pow(table.tau, table.beta);

  std::vector<double> w(K + 1);
  for (int j = 0; j <= K; ++j) w[j] = v[j] * v[j];

  // D_m = tau^{-beta} sum_{j<=m} varpi_{m-j} (w_j - w_0)
  std::vector<double> D(K + 1);
  for (int m = 0; m <= K; ++m) {
    double acc = 0.0;
    for (int j = 0; j <= m; ++j) acc += table.varpi[m - j] * (w[j] - w[0]);
    D[m] = ct * acc;
  }

  double worst = 0.0;
  for (int k = 0; k <= K; ++k) {
    double lhs = 0.0;
    for (int m = 0; m <= k; ++m) lhs += pb * table.varrho[k - m] * D[m];
    worst = std::max(worst, std::abs(lhs - (w[k] - w[0])));
  }
  return worst;
}

double verify_lemma_2_3(double beta, double mu, double tau, int n_steps) {
  if (!(mu > 0.0))
    throw std::invalid_argument("verify_lemma_2_3: mu must be positive");
  if (n_steps < 1)
    throw std::invalid_argument("verify_lemma_2_3: n_steps must be >= 1");
  const std::vector<double> rho = inverse_weights(beta, n_steps);
  const double pb = std::pow(tau, beta);

  MittagLefflerParams mp;
  mp.beta = beta;
  // The series peaks near term z^{1/beta}/beta, which for small beta and
  // mu t^beta of a few units runs into the thousands; give it headroom.
  mp.max_terms = 20000;
  std::vector<double> E(n_steps + 1);
  for (int j = 0; j <= n_steps; ++j)
    E[j] = mlf_eval(mp, mu * std::pow(j * tau, beta));

  double min_slack = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= n_steps; ++k) {
    double lhs = 0.0;
    for (int j = 0; j < k; ++j) lhs += pb * rho[k - j] * E[j];
    min_slack = std::min(min_slack, E[k] - 1.0 - mu * lhs);
  }
  return min_slack;
}

GronwallResult run_gronwall_scenario(const GronwallScenario& s) {
  validate(s);
  const int n = s.n_steps;
  const std::vector<double> varpi = cq_weights(s.beta, n);
  const std::vector<double> varrho = inverse_weights(s.beta, n);
  const double ct = std::pow(s.tau, -s.beta);
  const double pb = std::pow(s.tau, s.beta);

  GronwallResult out;
  out.v.assign(n + 1, 0.0);
  out.v[0] = s.v0;
  std::vector<double> w(n + 1, 0.0);  // squares, for the quadratic variant
  w[0] = s.v0 * s.v0;

  for (int k = 1; k <= n; ++k) {
    if (s.first_power) {
      // Linear form: D v^k = sum_{l=1}^k lambda_{k-l} v^l + g^k, solved for v^k.
      double hist = 0.0;
      for (int j = 1; j < k; ++j) hist += varpi[k - j] * (out.v[j] - out.v[0]);
      double rhs = ct * (out.v[0] - hist) + g_at(s, k);
      for (int l = 1; l < k; ++l) rhs += lambda_at(s, k - l) * out.v[l];
      const double A = ct - lambda_at(s, 0);
      if (!(A > 0.0))
        throw std::runtime_error(
            "gronwall scenario: degenerate step (lambda_0 >= tau^{-beta})");
      const double vk = rhs / A;
      if (vk < -1e-14)
        throw std::runtime_error(
            "gronwall scenario: no non-negative solution at step " +
            std::to_string(k));
      out.v[k] = std::max(vk, 0.0);
      continue;
    }
    // Squared form, saturated: quadratic A s^2 - B s - C = 0 for s = v^k.
    double hist = 0.0;
    for (int j = 1; j < k; ++j) hist += varpi[k - j] * (w[j] - w[0]);
    const double G = (1.0 - s.theta) * g_at(s, k) + s.theta * g_at(s, k - 1);
    const double A = ct - lambda_at(s, 0);
    const double B = (1.0 - s.theta) * G;
    double C = ct * (w[0] - hist) + s.theta * out.v[k - 1] * G;
    for (int l = 1; l < k; ++l) C += lambda_at(s, k - l) * w[l];
    if (!(A > 0.0))
      throw std::runtime_error(
          "gronwall scenario: degenerate step (lambda_0 >= tau^{-beta})");
    const double disc = B * B + 4.0 * A * C;
    if (disc < 0.0)
      throw std::runtime_error(
          "gronwall scenario: no non-negative root at step " +
          std::to_string(k));
    const double sroot = (B + std::sqrt(disc)) / (2.0 * A);
    if (sroot < -1e-14)
      throw std::runtime_error(
          "gronwall scenario: no non-negative root at step " +
          std::to_string(k));
    out.v[k] = std::max(sroot, 0.0);
    w[k] = out.v[k] * out.v[k];
  }

  // Envelope 2 E_beta(2 lambda t_k^beta) (v^0 + max_{m<=k} sum_j P_{m-j} g^{j-theta}).
  MittagLefflerParams mp;
  mp.beta = s.beta;
  out.bound.assign(n + 1, 0.0);
  out.bound[0] = 2.0 * (s.v0);
  double max_gsum = 0.0;
  for (int k = 1; k <= n; ++k) {
    double gsum = 0.0;
    for (int j = 0; j <= k; ++j) {
      const double gj = s.first_power
                            ? g_at(s, j)
                            : (1.0 - s.theta) * g_at(s, j) +
                                  s.theta * g_at(s, j - 1);
      gsum += pb * varrho[k - j] * gj;
    }
    max_gsum = std::max(max_gsum, gsum);
    const double E =
        mlf_eval(mp, 2.0 * s.lambda_bound * std::pow(k * s.tau, s.beta));
    out.bound[k] = 2.0 * E * (s.v0 + max_gsum);
    if (out.v[k] > out.bound[k]) out.violated = true;
  }
  return out;
}

}  // namespace subdiff
