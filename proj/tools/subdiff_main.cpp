#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <subdiff/config.hpp>
#include <subdiff/cq_weights.hpp>
#include <subdiff/gronwall.hpp>
#include <subdiff/kernels.hpp>
#include <subdiff/mittag_leffler.hpp>
#include <subdiff/spectral.hpp>
#include <subdiff/stepper.hpp>
#include <subdiff/study.hpp>
#include <subdiff/version.hpp>

namespace {

using namespace subdiff;

// ---------------------------------------------------------------------------
// weights

int run_weights(double beta, int count, const std::string& kind, double tau) {
  std::vector<double> out;
  if (kind == "cq") {
    out = cq_weights(beta, count);
  } else if (kind == "inverse") {
    out = inverse_weights(beta, count);
  } else if (kind == "b") {
    out = partial_sums(cq_weights(beta, count));
  } else if (kind == "kernel") {
    CoefficientTable table(beta, tau, std::max(count, 1));
    out.reserve(count + 1);
    for (int m = 0; m <= count; ++m) out.push_back(gronwall_kernel(table, m));
  } else {
    throw std::invalid_argument("weights: --kind must be cq, inverse, b, or kernel");
  }
  for (double v : out) std::printf("%.17g\n", v);
  return 0;
}

// ---------------------------------------------------------------------------
// solve

int run_solve(const std::string& config_path, const std::string& dump_path) {
  const SolveConfig cfg = parse_solve_config(config_path);
  const SpectralSpace space = build_space(cfg.N);
  const TimeHistory hist = run(space, cfg.problem, cfg.scheme);

  const SpectralFunction u{&space, hist.levels.back()};
  std::printf("N=%d n_steps=%d tau=%.17g T=%.17g beta=%.17g |u(T)|_L2=%.17g\n",
              cfg.N, cfg.scheme.n_steps, cfg.problem.T / cfg.scheme.n_steps,
              cfg.problem.T, cfg.problem.beta, l2_norm(u));

  if (!dump_path.empty()) {
    std::ofstream out(dump_path, std::ios::binary);
    if (!out)
      throw std::runtime_error("solve: cannot open '" + dump_path +
                               "' for writing");
    const std::vector<double> vals = nodal_values(u);
    out << "x,u\n";
    char line[80];
    for (int i = 0; i <= space.N; ++i) {
      std::snprintf(line, sizeof line, "%.17g,%.17g\n", space.nodes[i],
                    vals[i]);
      out << line;
    }
    if (!out) throw std::runtime_error("solve: write failed for '" + dump_path + "'");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// converge

int run_converge(const std::string& config_path, const std::string& out_path,
                 const std::string& json_path) {
  const StudySpec spec = parse_study_config(config_path);
  const ConvergenceReport report = run_study(spec);
  if (!out_path.empty()) emit_report(report, ReportFormat::Csv, out_path);
  if (!json_path.empty()) emit_report(report, ReportFormat::Json, json_path);
  std::fputs(render_report(report, ReportFormat::Csv).c_str(), stdout);
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct CheckReport {
  int failures = 0;

  void row(const char* name, const std::string& params, double value,
           bool pass) {
    std::printf("%s,%s,%.6g,%d\n", name, params.c_str(), value, pass ? 1 : 0);
    if (!pass) ++failures;
  }
};

std::string fmt_params(const char* spec, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, spec);
  std::vsnprintf(buf, sizeof buf, spec, ap);
  va_end(ap);
  return buf;
}

// Exact sign/monotonicity chains and closed-form cross-checks for one beta.
void lemma_checks_for_beta(CheckReport& rep, double beta) {
  constexpr int K = 500;
  const std::vector<double> varpi = cq_weights(beta, K);
  const std::vector<double> varrho = inverse_weights(beta, K);
  const std::vector<double> b = partial_sums(varpi);
  const std::string tag = fmt_params("beta=%.2g;K=%d", beta, K);

  // varpi_0 = 1, and varpi_j < varpi_{j+1} < 0 for j >= 1.
  {
    double slack = varpi[0] == 1.0 ? 1.0 : -1.0;
    slack = std::min(slack, -varpi[1]);
    for (int j = 1; j + 1 <= K; ++j) {
      slack = std::min(slack, varpi[j + 1] - varpi[j]);
      slack = std::min(slack, -varpi[j + 1]);
    }
    rep.row("varpi_sign_chain", tag, slack, slack > 0.0);
  }
  // varrho_j > varrho_{j+1} > 0 (decreasing from varrho_0 = 1).
  {
    double slack = varrho[0] == 1.0 ? 1.0 : -1.0;
    for (int j = 0; j + 1 <= K; ++j) {
      slack = std::min(slack, varrho[j] - varrho[j + 1]);
      slack = std::min(slack, varrho[j + 1]);
    }
    rep.row("varrho_chain", tag, slack, slack > 0.0);
  }
  // varrho_j <= (j+1)^{beta-1} for j >= 0 and <= j^{beta-1} for j >= 1.
  {
    double slack = 1.0 - varrho[0];
    for (int j = 0; j <= K; ++j)
      slack = std::min(slack, std::pow(j + 1.0, beta - 1.0) - varrho[j]);
    for (int j = 1; j <= K; ++j)
      slack = std::min(slack, std::pow(j, beta - 1.0) - varrho[j]);
    rep.row("varrho_power_bound", tag, slack, slack >= 0.0);
  }
  // b_k > 0 and strictly decreasing.
  {
    double slack = b[0] == 1.0 ? 1.0 : -1.0;
    for (int k = 1; k <= K; ++k) {
      slack = std::min(slack, b[k - 1] - b[k]);
      slack = std::min(slack, b[k]);
    }
    rep.row("b_chain", tag, slack, slack > 0.0);
  }
  // Recurrences against the log-Gamma closed forms, 1e-12 relative.
  {
    double worst = 0.0;
    for (int j = 1; j <= K; ++j) {
      const double exact = -static_cast<double>(std::exp(
          std::lgamma(j - static_cast<long double>(beta)) -
          std::lgamma(-static_cast<long double>(beta)) -
          std::lgamma(j + 1.0L)));
      worst = std::max(worst, std::abs(varpi[j] - exact) / std::abs(exact));
    }
    rep.row("varpi_gamma_form", tag, worst, worst <= 1e-12);
  }
  {
    double worst = 0.0;
    for (int j = 1; j <= K; ++j) {
      const double exact = static_cast<double>(std::exp(
          std::lgamma(j + static_cast<long double>(beta)) -
          std::lgamma(static_cast<long double>(beta)) -
          std::lgamma(j + 1.0L)));
      worst = std::max(worst, std::abs(varrho[j] - exact) / exact);
    }
    rep.row("varrho_gamma_form", tag, worst, worst <= 1e-12);
  }
  {
    double worst = 0.0;
    for (int k = 1; k <= K; ++k) {
      const double exact = static_cast<double>(std::exp(
          std::lgamma(k + 1.0L - beta) - std::lgamma(1.0L - beta) -
          std::lgamma(k + 1.0L)));
      worst = std::max(worst, std::abs(b[k] - exact) / exact);
    }
    rep.row("b_gamma_form", tag, worst, worst <= 1e-12);
  }
  // theta_m = sum_j varpi_j varrho_{m-j}: 1 at m=0, 0 elsewhere.
  {
    double worst = std::abs(varpi[0] * varrho[0] - 1.0);
    for (int m = 1; m <= K; ++m) {
      double acc = 0.0;
      for (int j = 0; j <= m; ++j) acc += varpi[j] * varrho[m - j];
      worst = std::max(worst, std::abs(acc));
    }
    rep.row("convolution_identity", tag, worst, worst <= 1e-13);
  }
  // Running sums of varrho against the closed form and the k^beta/beta bound.
  {
    double worst = 0.0;
    double min_slack = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (int k = 1; k <= K; ++k) {
      sum += varrho[k - 1];
      const double exact = kernel_sum_closed_form(beta, k);
      worst = std::max(worst, std::abs(sum - exact) / exact);
      min_slack = std::min(min_slack, std::pow(k, beta) / beta - sum);
    }
    rep.row("kernel_sum_gamma_form", tag, worst, worst <= 1e-12);
    rep.row("kernel_sum_power_bound", tag, min_slack, min_slack >= 0.0);
  }
  // b_{k-1} Gamma(1-beta) k^beta -> 1, with the constant fit at k = 100 and
  // the decay checked at k = 1000.
  {
    const std::vector<double> blong = partial_sums(cq_weights(beta, 1000));
    const double gam = std::tgamma(1.0 - beta);
    const double c100 =
        std::abs(blong[99] * gam * std::pow(100.0, beta) - 1.0) * 100.0;
    const double at1000 =
        std::abs(blong[999] * gam * std::pow(1000.0, beta) - 1.0);
    rep.row("b_asymptotic", fmt_params("beta=%.2g;C=%.4g", beta, c100),
            at1000, at1000 <= 1.1 * c100 / 1000.0);
  }
}

int run_verify_lemmas(CheckReport& rep) {
  for (int i = 1; i <= 9; ++i) lemma_checks_for_beta(rep, i / 10.0);

  // Kernel-weighted Mittag-Leffler inequality across the pinned sweep.
  for (double beta : {0.2, 0.5, 0.8})
    for (double mu : {0.5, 1.0, 2.0})
      for (double tau : {std::pow(2.0, -4), std::pow(2.0, -6)}) {
        const double slack = verify_lemma_2_3(beta, mu, tau, 256);
        rep.row("lemma_2_3_slack",
                fmt_params("beta=%.2g;mu=%.2g;tau=%.6g;n=256", beta, mu, tau),
                slack, slack >= -1e-12);
      }
  // mu -> 0+ limit: slack collapses to zero from above.
  {
    const double slack = verify_lemma_2_3(0.5, 1e-8, std::pow(2.0, -6), 64);
    rep.row("lemma_2_3_mu_zero_limit", "beta=0.5;mu=1e-08;n=64",
            slack, slack >= -1e-15 && slack <= 1e-6);
  }
  return rep.failures == 0 ? 0 : 1;
}

int run_verify_identity(CheckReport& rep, std::uint64_t seed) {
  const int n_T = 128;
  for (int bi = 1; bi <= 9; ++bi) {
    const double beta = bi / 10.0;
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(bi));
    std::uniform_real_distribution<double> value(-5.0, 5.0);
    std::uniform_real_distribution<double> step(0.01, 1.0);

    double worst_scaled = 0.0;
    for (int rep_i = 0; rep_i < 112; ++rep_i) {
      const CoefficientTable table(beta, step(rng), n_T);
      std::vector<double> v(n_T + 1);
      for (double& x : v) x = value(rng);
      double maxsq = 0.0;
      for (double x : v) maxsq = std::max(maxsq, x * x);
      const double res = verify_kernel_identity(table, v);
      worst_scaled = std::max(worst_scaled, res / std::max(maxsq, 1e-300));
    }
    rep.row("kernel_identity_random",
            fmt_params("beta=%.2g;sequences=112;n=%d;seed=%llu", beta, n_T,
                       static_cast<unsigned long long>(seed)),
            worst_scaled, worst_scaled <= 1e-11);

    {
      const CoefficientTable table(beta, 0.1, 64);
      const std::vector<double> v(65, 2.5);
      const double res = verify_kernel_identity(table, v);
      rep.row("kernel_identity_constant", fmt_params("beta=%.2g;n=64", beta),
              res, res == 0.0);
    }
    {
      const CoefficientTable table(beta, 0.1, 64);
      std::vector<double> v(65);
      for (int i = 0; i <= 64; ++i) v[i] = i % 2;
      const double res = verify_kernel_identity(table, v);
      rep.row("kernel_identity_alternating", fmt_params("beta=%.2g;n=64", beta),
              res, res <= 1e-12);
    }
  }
  return rep.failures == 0 ? 0 : 1;
}

GronwallScenario random_scenario(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GronwallScenario s;
  s.beta = 0.05 + 0.90 * unit(rng);
  s.n_steps = 8 + static_cast<int>(unit(rng) * 120.0);
  s.first_power = unit(rng) < 0.25;
  static constexpr double thetas[3] = {0.0, 0.5, 1.0};
  s.theta = thetas[rng() % 3];
  s.v0 = 2.0 * unit(rng);

  const int nlam = static_cast<int>(rng() % 4);
  double sum = 0.0;
  for (int i = 0; i < nlam; ++i) {
    s.lambdas.push_back(2.0 * unit(rng));
    sum += s.lambdas.back();
  }
  s.lambda_bound = sum;
  if (sum > 0.0) {
    const double tau_max =
        std::pow(2.0 * sum * (1.0 + s.beta), -1.0 / s.beta);
    s.tau = tau_max * (0.05 + 0.95 * unit(rng));
  } else {
    s.tau = 0.01 + 9.99 * unit(rng);  // any tau is admissible without lambda
  }
  s.g.resize(s.n_steps + 1);
  for (double& gv : s.g) gv = unit(rng);
  return s;
}

int run_verify_gronwall(CheckReport& rep, std::uint64_t seed) {
  // Pinned hand-checkable cases first.
  {
    GronwallScenario s;
    s.beta = 0.5; s.tau = 0.1; s.n_steps = 64; s.v0 = 1.0;
    const GronwallResult r = run_gronwall_scenario(s);
    double dev = 0.0;
    for (double vk : r.v) dev = std::max(dev, std::abs(vk - 1.0));
    rep.row("trivial_constant", "beta=0.5;tau=0.1;n=64", dev,
            !r.violated && dev <= 1e-12);
  }
  {
    GronwallScenario s;
    s.beta = 0.5; s.n_steps = 128; s.v0 = 1.0;
    s.lambdas = {1.0};
    s.lambda_bound = 1.0;
    s.tau = std::pow(2.0 * 1.0 * 1.5, -2.0);  // exactly at the step restriction
    const GronwallResult r = run_gronwall_scenario(s);
    double slack = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= s.n_steps; ++k)
      slack = std::min(slack, r.bound[k] - r.v[k]);
    rep.row("lambda_at_limit", "beta=0.5;lambda0=1;tau=1/9;n=128", slack,
            !r.violated);
  }
  {
    GronwallScenario s;
    s.beta = 0.5; s.n_steps = 128; s.v0 = 1.0;
    s.lambdas = {1.0};
    s.lambda_bound = 1.0;
    s.tau = std::pow(3.0, -2.0);
    s.first_power = true;
    s.g.assign(s.n_steps + 1, 0.5);
    const GronwallResult r = run_gronwall_scenario(s);
    double slack = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= s.n_steps; ++k)
      slack = std::min(slack, r.bound[k] - r.v[k]);
    rep.row("first_power_linear", "beta=0.5;lambda0=1;tau=1/9;n=128", slack,
            !r.violated);
  }
  {
    GronwallScenario s;  // no lambda: the step restriction is vacuous
    s.beta = 0.5; s.tau = 10.0; s.n_steps = 64; s.v0 = 1.0;
    s.g.assign(s.n_steps + 1, 0.3);
    const GronwallResult r = run_gronwall_scenario(s);
    double slack = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= s.n_steps; ++k)
      slack = std::min(slack, r.bound[k] - r.v[k]);
    rep.row("unrestricted_tau", "beta=0.5;tau=10;n=64", slack, !r.violated);
  }

  // Randomized admissible scenarios, equality-saturated.
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 500; ++i) {
    const GronwallScenario s = random_scenario(rng);
    const GronwallResult r = run_gronwall_scenario(s);
    double slack = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= s.n_steps; ++k)
      slack = std::min(slack, r.bound[k] - r.v[k]);
    rep.row("random_scenario",
            fmt_params("i=%d;beta=%.3g;theta=%.2g;fp=%d;nlam=%d;tau=%.4g;n=%d",
                       i, s.beta, s.theta, s.first_power ? 1 : 0,
                       static_cast<int>(s.lambdas.size()), s.tau, s.n_steps),
            slack, !r.violated);
  }

  // Sub-equality coverage: a sequence saturating the condition with data g is
  // strictly admissible for the inflated data c*g (c > 1), so it must stay
  // under the envelope computed from the inflated scenario.
  for (int i = 0; i < 40; ++i) {
    GronwallScenario s = random_scenario(rng);
    const GronwallResult tight = run_gronwall_scenario(s);
    GronwallScenario inflated = s;
    const double c = 1.5 + (i % 4) * 0.5;
    for (double& gv : inflated.g) gv *= c;
    const GronwallResult wide = run_gronwall_scenario(inflated);
    double slack = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= s.n_steps; ++k)
      slack = std::min(slack, wide.bound[k] - tight.v[k]);
    rep.row("sub_equality_domination",
            fmt_params("i=%d;beta=%.3g;c=%.2g;n=%d", i, s.beta, c, s.n_steps),
            slack, slack >= 0.0);
  }
  return rep.failures == 0 ? 0 : 1;
}

int run_verify(const std::string& suite, std::uint64_t seed) {
  CheckReport rep;
  std::printf("check_name,parameters,slack_or_residual,pass\n");
  if (suite == "lemmas") return run_verify_lemmas(rep);
  if (suite == "identity") return run_verify_identity(rep, seed);
  if (suite == "gronwall") return run_verify_gronwall(rep, seed);
  throw std::invalid_argument("verify: --suite must be lemmas, gronwall, or identity");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subdiffusion solver: CQ time stepping with a Legendre-Galerkin "
               "space discretization, plus numerical certification of the "
               "discrete fractional Gronwall toolkit"};
  app.set_version_flag("--version", SUBDIFF_VERSION);
  app.require_subcommand(1);

  double w_beta = 0.5, w_tau = 1.0;
  int w_count = 0;
  std::string w_kind = "cq";
  CLI::App* weights = app.add_subcommand("weights", "Print CQ weight families");
  weights->add_option("--beta", w_beta, "fractional order in (0,1)")->required();
  weights->add_option("--count", w_count, "largest index K; prints K+1 values")
      ->required();
  weights->add_option("--kind", w_kind, "cq | inverse | b | kernel");
  weights->add_option("--tau", w_tau, "time step (kernel only)");

  double m_beta = 0.5, m_z = 0.0;
  CLI::App* mlf = app.add_subcommand("mlf", "Evaluate E_beta(z)");
  mlf->add_option("--beta", m_beta, "order in (0,1]")->required();
  mlf->add_option("--z", m_z, "argument, >= 0")->required();

  std::string s_config, s_dump;
  CLI::App* solve = app.add_subcommand("solve", "Run one scheme over one grid");
  solve->add_option("--config", s_config, "JSON problem/scheme description")
      ->required();
  solve->add_option("--dump-solution", s_dump, "write final nodal values as CSV");

  std::string c_config, c_out, c_json;
  CLI::App* converge =
      app.add_subcommand("converge", "Run a convergence study");
  converge->add_option("--config", c_config, "JSON study description")
      ->required();
  converge->add_option("--out", c_out, "write the CSV report to this path");
  converge->add_option("--json", c_json, "also write a JSON report to this path");

  std::string v_suite;
  std::uint64_t v_seed = 12345;
  CLI::App* verify =
      app.add_subcommand("verify", "Certify the discrete Gronwall machinery");
  verify->add_option("--suite", v_suite, "lemmas | gronwall | identity")
      ->required();
  verify->add_option("--seed", v_seed, "RNG seed for randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help / --version
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*weights) return run_weights(w_beta, w_count, w_kind, w_tau);
    if (*mlf) {
      MittagLefflerParams params;
      params.beta = m_beta;
      std::printf("%.15g\n", mlf_eval(params, m_z));
      return 0;
    }
    if (*solve) return run_solve(s_config, s_dump);
    if (*converge) return run_converge(c_config, c_out, c_json);
    if (*verify) return run_verify(v_suite, v_seed);
  } catch (const config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const solver_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
