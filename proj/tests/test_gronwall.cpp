#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <subdiff/gronwall.hpp>
#include <subdiff/mittag_leffler.hpp>

#include "oracles.hpp"

using namespace subdiff;

namespace {

GronwallScenario random_scenario(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GronwallScenario s;
  s.beta = 0.05 + 0.90 * unit(rng);
  s.n_steps = 8 + static_cast<int>(unit(rng) * 56.0);
  s.first_power = unit(rng) < 0.25;
  const double thetas[3] = {0.0, 0.5, 1.0};
  s.theta = thetas[rng() % 3];
  s.v0 = 2.0 * unit(rng);
  const int nlam = static_cast<int>(rng() % 4);
  double sum = 0.0;
  for (int i = 0; i < nlam; ++i) {
    s.lambdas.push_back(2.0 * unit(rng));
    sum += s.lambdas.back();
  }
  s.lambda_bound = sum;
  s.tau = sum > 0.0
              ? std::pow(2.0 * sum * (1.0 + s.beta), -1.0 / s.beta) *
                    (0.05 + 0.95 * unit(rng))
              : 0.01 + 9.99 * unit(rng);
  s.g.resize(s.n_steps + 1);
  for (double& gv : s.g) gv = unit(rng);
  return s;
}

double min_slack(const GronwallResult& r) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < r.v.size(); ++k)
    m = std::min(m, r.bound[k] - r.v[k]);
  return m;
}

}  // namespace

TEST_CASE("telescoping identity: exact cases") {
  SUBCASE("constant sequences have zero residual exactly") {
    for (double beta : {0.2, 0.5, 0.8}) {
      const CoefficientTable table(beta, 0.37, 64);
      const std::vector<double> v(65, 3.25);
      CHECK(verify_kernel_identity(table, v) == 0.0);
    }
  }
  SUBCASE("alternating 0/1 sequence") {
    const CoefficientTable table(0.5, 0.1, 64);
    std::vector<double> v(65);
    for (int i = 0; i <= 64; ++i) v[i] = i % 2;
    CHECK(verify_kernel_identity(table, v) <= 1e-12);
  }
  SUBCASE("random sequences stay within the scaled tolerance") {
    auto rng = oracles::rng(6001);
    std::uniform_real_distribution<double> value(-5.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
      const double beta = 0.05 + 0.9 * (trial % 10) / 10.0;
      const CoefficientTable table(beta, 0.02 + 0.01 * trial, 128);
      std::vector<double> v(129);
      double maxsq = 0.0;
      for (double& x : v) {
        x = value(rng);
        maxsq = std::max(maxsq, x * x);
      }
      CHECK(verify_kernel_identity(table, v) <= 1e-11 * maxsq);
    }
  }
  SUBCASE("short sequences use only the available levels") {
    const CoefficientTable table(0.5, 0.1, 64);
    CHECK(verify_kernel_identity(table, {1.0, 2.0}) <= 1e-14);
    CHECK(verify_kernel_identity(table, {}) == 0.0);
  }
}

TEST_CASE("kernel-weighted Mittag-Leffler inequality") {
  SUBCASE("k=1 reduction matches the two-term hand bound") {
    const double beta = 0.5, mu = 1.0, tau = 1.0 / 64.0;
    const double slack = verify_lemma_2_3(beta, mu, tau, 1);
    MittagLefflerParams p;
    p.beta = beta;
    const double hand =
        mlf_eval(p, mu * std::pow(tau, beta)) - 1.0 -
        mu * std::pow(tau, beta) * beta;
    CHECK(slack == doctest::Approx(hand).epsilon(1e-12));
    CHECK(slack >= 0.0);
  }
  SUBCASE("pinned point is strictly positive") {
    CHECK(verify_lemma_2_3(0.5, 1.0, 1.0 / 64.0, 256) > 0.0);
  }
  SUBCASE("full sweep is non-negative up to rounding") {
    for (double beta : {0.2, 0.5, 0.8})
      for (double mu : {0.5, 1.0, 2.0})
        for (double tau : {1.0 / 16.0, 1.0 / 64.0})
          CHECK(verify_lemma_2_3(beta, mu, tau, 256) >= -1e-12);
  }
  SUBCASE("mu -> 0 collapses the slack to zero from above") {
    const double slack = verify_lemma_2_3(0.5, 1e-8, 1.0 / 64.0, 64);
    CHECK(slack >= -1e-15);
    CHECK(slack <= 1e-6);
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(verify_lemma_2_3(0.5, 0.0, 0.1, 8), std::invalid_argument);
    CHECK_THROWS_AS(verify_lemma_2_3(0.5, 1.0, 0.1, 0), std::invalid_argument);
  }
}

TEST_CASE("scenario runner: hand-checkable cases") {
  SUBCASE("no data means a constant sequence and envelope 2") {
    GronwallScenario s;
    s.beta = 0.5;
    s.tau = 0.1;
    s.n_steps = 64;
    s.v0 = 1.0;
    const GronwallResult r = run_gronwall_scenario(s);
    CHECK_FALSE(r.violated);
    for (int k = 0; k <= 64; ++k) {
      CHECK(r.v[k] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(r.bound[k] == doctest::Approx(2.0).epsilon(1e-12));
    }
  }
  SUBCASE("lambda at the step-size limit") {
    GronwallScenario s;
    s.beta = 0.5;
    s.n_steps = 128;
    s.v0 = 1.0;
    s.lambdas = {1.0};
    s.lambda_bound = 1.0;
    s.tau = 1.0 / 9.0;  // (2 * 1 * 1.5)^{-1/0.5}
    const GronwallResult r = run_gronwall_scenario(s);
    CHECK_FALSE(r.violated);
    // the sequence genuinely grows, so the test is not vacuous
    CHECK(r.v.back() > r.v.front());
  }
  SUBCASE("first-power (linear) variant on the same grid") {
    GronwallScenario s;
    s.beta = 0.5;
    s.n_steps = 128;
    s.v0 = 1.0;
    s.lambdas = {1.0};
    s.lambda_bound = 1.0;
    s.tau = 1.0 / 9.0;
    s.first_power = true;
    s.g.assign(129, 0.25);
    const GronwallResult r = run_gronwall_scenario(s);
    CHECK_FALSE(r.violated);
    CHECK(min_slack(r) >= 0.0);
  }
  SUBCASE("without lambda any tau is admissible") {
    GronwallScenario s;
    s.beta = 0.5;
    s.tau = 10.0;
    s.n_steps = 64;
    s.v0 = 1.0;
    s.g.assign(65, 0.3);
    const GronwallResult r = run_gronwall_scenario(s);
    CHECK_FALSE(r.violated);
  }
  SUBCASE("theta shifts the g coupling without breaking the bound") {
    for (double theta : {0.0, 0.5, 1.0}) {
      GronwallScenario s;
      s.beta = 0.3;
      s.tau = 0.05;
      s.n_steps = 96;
      s.v0 = 0.5;
      s.theta = theta;
      s.g.assign(97, 0.8);
      const GronwallResult r = run_gronwall_scenario(s);
      CHECK_FALSE(r.violated);
    }
  }
}

TEST_CASE("scenario runner: randomized sweep stays under the envelope") {
  auto rng = oracles::rng(6002);
  for (int i = 0; i < 100; ++i) {
    const GronwallScenario s = random_scenario(rng);
    CAPTURE(i);
    CAPTURE(s.beta);
    CAPTURE(s.tau);
    CAPTURE(s.theta);
    CAPTURE(s.first_power);
    const GronwallResult r = run_gronwall_scenario(s);
    CHECK_FALSE(r.violated);
    CHECK(min_slack(r) >= 0.0);
  }
}

TEST_CASE("inadmissible scenarios are rejected") {
  GronwallScenario s;
  s.beta = 0.5;
  s.tau = 0.1;
  s.n_steps = 8;

  GronwallScenario bad = s;
  bad.beta = 1.0;
  CHECK_THROWS_AS(run_gronwall_scenario(bad), std::invalid_argument);

  bad = s;
  bad.tau = 0.0;
  CHECK_THROWS_AS(run_gronwall_scenario(bad), std::invalid_argument);

  bad = s;
  bad.theta = 1.5;
  CHECK_THROWS_AS(run_gronwall_scenario(bad), std::invalid_argument);

  bad = s;
  bad.v0 = -1.0;
  CHECK_THROWS_AS(run_gronwall_scenario(bad), std::invalid_argument);

  bad = s;
  bad.lambdas = {-0.5};
  bad.lambda_bound = 0.5;
  CHECK_THROWS_AS(run_gronwall_scenario(bad), std::invalid_argument);

  bad = s;
  bad.g = {0.1, -0.1};
  CHECK_THROWS_AS(run_gronwall_scenario(bad), std::invalid_argument);

  bad = s;
  bad.lambdas = {1.0, 1.0};
  bad.lambda_bound = 1.0;  // smaller than the sum
  CHECK_THROWS_AS(run_gronwall_scenario(bad), std::invalid_argument);

  bad = s;
  bad.lambdas = {1.0};
  bad.lambda_bound = 1.0;
  bad.tau = 0.2;  // above (2*1*1.5)^{-2} = 1/9
  CHECK_THROWS_AS(run_gronwall_scenario(bad), std::invalid_argument);
}
