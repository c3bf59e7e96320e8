#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <subdiff/stepper.hpp>

namespace subdiff {

struct ExactReference {
  std::function<double(double, double)> u;  // u(x, t)
};

struct SelfReference {
  int N_ref = 0;        // must equal the study's N (errors are pure time errors)
  double tau_ref = 0.0; // must divide every tau in the grid
};

using Reference = std::variant<ExactReference, SelfReference>;

enum class ErrorMeasure {
  Final,        // L2 error at eval_time
  MaxOverTime,  // max of the L2 error over all coarse-grid times up to eval_time
};

struct StudySpec {
  ProblemSpec problem;
  SchemeSpec scheme;  // n_steps is derived from each tau
  int N = 0;
  std::vector<double> tau_grid;  // strictly descending
  Reference reference;
  double eval_time = 1.0;
  ErrorMeasure error_measure = ErrorMeasure::Final;
  std::string label;  // free-form description echoed into report metadata
};

struct ConvergenceRow {
  double tau = 0.0;
  double l2_error = 0.0;
  std::optional<double> observed_order;  // log2(err_{j-1}/err_j); empty on row 0
};

struct ReportMetadata {
  std::string version;
  std::string timestamp_utc;  // emitted in JSON only, so CSV stays byte-stable
  std::string study_echo;     // canonical JSON echo of the study parameters
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  ReportMetadata metadata;
};

struct ManufacturedProblem {
  ProblemSpec problem;
  std::function<double(double, double)> exact;
};

// u(x,t) = (1 + t^sigma) sin(pi x) with the forcing that makes it exact:
// f = [Gamma(sigma+1)/Gamma(sigma+1-beta)] t^{sigma-beta} sin(pi x)
//     + mu pi^2 (1 + t^sigma) sin(pi x).
// Throws std::domain_error if sigma <= beta.
ManufacturedProblem manufactured_problem(double sigma, double beta, double mu);

ConvergenceReport run_study(const StudySpec& spec);

enum class ReportFormat { Csv, Json };

std::string render_report(const ConvergenceReport& report, ReportFormat fmt);
void emit_report(const ConvergenceReport& report, ReportFormat fmt,
                 const std::string& path);

}  // namespace subdiff
