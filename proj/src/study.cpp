#include <subdiff/study.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include <subdiff/version.hpp>

namespace subdiff {

namespace {

using nlohmann::json;

long long as_integer_multiple(double whole, double part, const char* what) {
  const long long n = std::llround(whole / part);
  if (n < 1 || std::abs(n * part - whole) > 1e-9 * std::max(1.0, std::abs(whole)))
    throw std::invalid_argument(std::string(what) + ": " +
                                std::to_string(part) +
                                " does not divide " + std::to_string(whole));
  return n;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* scheme_kind_name(SchemeKind k) {
  switch (k) {
    case SchemeKind::LinearP1:
      return "linear_p1";
    case SchemeKind::LinearP2:
      return "linear_p2";
    case SchemeKind::SemiImplicit1:
      return "semi_implicit_1";
    case SchemeKind::SemiImplicit2:
      return "semi_implicit_2";
  }
  return "?";
}

std::string iso_utc_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string build_echo(const StudySpec& spec) {
  json j;
  if (!spec.label.empty()) j["label"] = spec.label;
  j["N"] = spec.N;
  j["beta"] = spec.problem.beta;
  j["mu"] = spec.problem.mu;
  j["T"] = spec.problem.T;
  j["eval_time"] = spec.eval_time;
  j["error_measure"] = spec.error_measure == ErrorMeasure::Final
                           ? "final"
                           : "max_over_time";
  json sch;
  sch["kind"] = scheme_kind_name(spec.scheme.kind);
  if (spec.scheme.kind == SchemeKind::SemiImplicit2) {
    if (const auto* r = std::get_if<RefinedFirstStep>(&spec.scheme.startup))
      sch["startup"] = {{"kind", "refined"}, {"factor", r->factor}};
    else
      sch["startup"] = {{"kind", "implicit"}};
  }
  j["scheme"] = sch;
  if (const auto* sr = std::get_if<SelfReference>(&spec.reference))
    j["reference"] = {{"kind", "self"},
                      {"N_ref", sr->N_ref},
                      {"tau_ref", sr->tau_ref}};
  else
    j["reference"] = {{"kind", "exact"}};
  j["tau_grid"] = spec.tau_grid;
  return j.dump();
}

}  // namespace

ManufacturedProblem manufactured_problem(double sigma, double beta,
                                         double mu) {
  if (!(sigma > beta))
    throw std::domain_error(
        "manufactured_problem: sigma must exceed beta (got sigma=" +
        std::to_string(sigma) + ", beta=" + std::to_string(beta) + ")");
  // Caputo derivative of t^sigma is [Gamma(sigma+1)/Gamma(sigma+1-beta)] t^{sigma-beta}.
  const double cf =
      std::exp(std::lgamma(sigma + 1.0) - std::lgamma(sigma + 1.0 - beta));
  const double pi2 = M_PI * M_PI;
  ManufacturedProblem mp;
  mp.problem.mu = mu;
  mp.problem.beta = beta;
  mp.problem.T = 1.0;
  mp.problem.initial = [](double x) { return std::sin(M_PI * x); };
  mp.problem.forcing = LinearForcing{[sigma, beta, mu, cf, pi2](double x,
                                                                double t) {
    const double s = std::sin(M_PI * x);
    return cf * std::pow(t, sigma - beta) * s +
           mu * pi2 * (1.0 + std::pow(t, sigma)) * s;
  }};
  mp.exact = [sigma](double x, double t) {
    return (1.0 + std::pow(t, sigma)) * std::sin(M_PI * x);
  };
  return mp;
}

ConvergenceReport run_study(const StudySpec& spec) {
  if (spec.N < 2) throw std::invalid_argument("run_study: N must be >= 2");
  if (!(spec.eval_time > 0.0) ||
      spec.eval_time > spec.problem.T * (1.0 + 1e-12))
    throw std::invalid_argument(
        "run_study: eval_time must lie in (0, T]");
  for (std::size_t i = 0; i < spec.tau_grid.size(); ++i) {
    if (!(spec.tau_grid[i] > 0.0))
      throw std::invalid_argument("run_study: tau values must be positive");
    if (i > 0 && !(spec.tau_grid[i] < spec.tau_grid[i - 1]))
      throw std::invalid_argument(
          "run_study: tau_grid must be strictly descending");
  }

  ConvergenceReport report;
  report.metadata.version = SUBDIFF_VERSION;
  report.metadata.timestamp_utc = iso_utc_now();
  report.metadata.study_echo = build_echo(spec);
  if (spec.tau_grid.empty()) return report;

  const SpectralSpace space = build_space(spec.N);

  // Reference preparation: either a resolved run on the same space or the
  // exact solution with over-integrated quadrature.
  const SelfReference* sr = std::get_if<SelfReference>(&spec.reference);
  const ExactReference* er = std::get_if<ExactReference>(&spec.reference);
  TimeHistory ref_history{{}, CoefficientTable(spec.problem.beta, 1.0, 1)};
  SpectralSpace fine;
  if (sr) {
    if (sr->N_ref != spec.N)
      throw std::invalid_argument(
          "run_study: self-reference requires N_ref == N so errors are pure "
          "time errors");
    if (!(sr->tau_ref > 0.0))
      throw std::invalid_argument("run_study: tau_ref must be positive");
    double min_above_ref = 0.0;
    for (double tau : spec.tau_grid) {
      as_integer_multiple(tau, sr->tau_ref, "run_study: tau_ref");
      if (tau > sr->tau_ref * (1.0 + 1e-12))
        min_above_ref = min_above_ref == 0.0 ? tau : std::min(min_above_ref, tau);
    }
    if (min_above_ref != 0.0 && !(sr->tau_ref < min_above_ref / 4.0))
      throw std::invalid_argument(
          "run_study: tau_ref must be smaller than a quarter of the coarsest "
          "non-reference tau");
    SchemeSpec ref_scheme = spec.scheme;
    ref_scheme.n_steps = static_cast<int>(
        as_integer_multiple(spec.problem.T, sr->tau_ref, "run_study: tau_ref"));
    try {
      ref_history = run(space, spec.problem, ref_scheme);
    } catch (const solver_error& e) {
      throw solver_error(
          std::string("reference run (tau=") + format_g17(sr->tau_ref) +
              ") diverged: " + e.what(),
          e.step());
    }
  } else {
    if (!er || !er->u)
      throw std::invalid_argument("run_study: exact reference is not set");
    fine = build_space(2 * spec.N);
  }

  for (double tau : spec.tau_grid) {
    SchemeSpec scheme = spec.scheme;
    scheme.n_steps = static_cast<int>(
        as_integer_multiple(spec.problem.T, tau, "run_study: tau"));
    const long long k_eval =
        as_integer_multiple(spec.eval_time, tau, "run_study: eval_time");

    TimeHistory hist{{}, CoefficientTable(spec.problem.beta, 1.0, 1)};
    try {
      hist = run(space, spec.problem, scheme);
    } catch (const solver_error& e) {
      throw solver_error(
          std::string("tau=") + format_g17(tau) + ": " + e.what(), e.step());
    }

    long long stride = 1;
    if (sr) stride = std::llround(tau / sr->tau_ref);

    auto error_at = [&](long long k) {
      if (sr) {
        const auto& a = hist.levels[k];
        const auto& b = ref_history.levels[k * stride];
        SpectralFunction d;
        d.space = &space;
        d.coeff.resize(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) d.coeff[i] = a[i] - b[i];
        return l2_norm(d);
      }
      SpectralFunction u;
      u.space = &space;
      u.coeff = hist.levels[k];
      const double t = k * tau;
      return l2_error(
          u, [&](double x) { return er->u(x, t); }, fine);
    };

    double err;
    if (spec.error_measure == ErrorMeasure::Final) {
      err = error_at(k_eval);
    } else {
      err = 0.0;
      for (long long k = 1; k <= k_eval; ++k)
        err = std::max(err, error_at(k));
    }
    report.rows.push_back(ConvergenceRow{tau, err, std::nullopt});
  }

  for (std::size_t j = 1; j < report.rows.size(); ++j) {
    const double e0 = report.rows[j - 1].l2_error;
    const double e1 = report.rows[j].l2_error;
    const double r = spec.tau_grid[j - 1] / spec.tau_grid[j];
    if (e0 > 0.0 && e1 > 0.0 && std::isfinite(e0) && std::isfinite(e1))
      report.rows[j].observed_order = std::log(e0 / e1) / std::log(r);
  }
  return report;
}

std::string render_report(const ConvergenceReport& report, ReportFormat fmt) {
  if (fmt == ReportFormat::Csv) {
    std::string out = "tau,l2_error,order\n";
    for (const auto& row : report.rows) {
      out += format_g17(row.tau);
      out += ',';
      out += format_g17(row.l2_error);
      out += ',';
      if (row.observed_order) out += format_g17(*row.observed_order);
      out += '\n';
    }
    return out;
  }
  json j;
  j["metadata"]["version"] = report.metadata.version;
  j["metadata"]["timestamp_utc"] = report.metadata.timestamp_utc;
  j["metadata"]["study"] =
      report.metadata.study_echo.empty()
          ? json()
          : json::parse(report.metadata.study_echo);
  j["rows"] = json::array();
  for (const auto& row : report.rows) {
    json r;
    r["tau"] = row.tau;
    r["l2_error"] = row.l2_error;
    if (row.observed_order)
      r["order"] = *row.observed_order;
    else
      r["order"] = nullptr;
    j["rows"].push_back(r);
  }
  return j.dump(2) + "\n";
}

void emit_report(const ConvergenceReport& report, ReportFormat fmt,
                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("emit_report: cannot open '" + path +
                             "' for writing");
  const std::string body = render_report(report, fmt);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  out.flush();
  if (!out)
    throw std::runtime_error("emit_report: write to '" + path + "' failed");
}

}  // namespace subdiff
