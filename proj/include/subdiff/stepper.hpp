#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <subdiff/cq_weights.hpp>
#include <subdiff/spectral.hpp>

namespace subdiff {

// Raised on divergence or iteration failure; carries the failing step.
class solver_error : public std::runtime_error {
 public:
  solver_error(const std::string& what, int step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"),
        step_(step) {}
  int step() const { return step_; }

 private:
  int step_ = 0;
};

struct LinearForcing {
  std::function<double(double, double)> f;  // f(x, t)
};

struct NonlinearForcing {
  std::function<double(double)> f;       // f(u)
  std::function<double(double)> fprime;  // f'(u), used for diagnostics
};

using Forcing = std::variant<LinearForcing, NonlinearForcing>;

struct ProblemSpec {
  double mu = 1.0;    // diffusion coefficient, > 0
  double beta = 0.5;  // fractional order, in (0,1)
  double T = 1.0;     // final time, > 0
  std::function<double(double)> initial;  // must vanish at x = +-1
  Forcing forcing;
};

enum class SchemeKind { LinearP1, LinearP2, SemiImplicit1, SemiImplicit2 };

// How SemiImplicit2 obtains u^1 before the two-level extrapolation applies.
struct ImplicitFirstStep {};            // fixed-point iteration on step 1
struct RefinedFirstStep { int factor = 64; };  // SemiImplicit1 sub-run on [0,tau]
using Startup = std::variant<ImplicitFirstStep, RefinedFirstStep>;

struct SchemeSpec {
  SchemeKind kind = SchemeKind::SemiImplicit1;
  int n_steps = 0;
  Startup startup = RefinedFirstStep{64};
};

struct TimeHistory {
  std::vector<std::vector<double>> levels;  // modal coefficients; levels[0] = I_N u0
  CoefficientTable table;
};

// tau^{-beta} sum_{j=0}^{k} varpi_{k-j} (u^j - u^0) as a modal vector.
std::vector<double> caputo_cq_apply(const TimeHistory& history, int k);

// Advances one scheme over its full time grid. The system matrix is
// assembled and factored once; each step costs one banded solve plus the
// history convolution. Throws solver_error (with the step index) on
// divergence, std::invalid_argument on inconsistent specs.
class Stepper {
 public:
  Stepper(const SpectralSpace& space, const ProblemSpec& problem,
          const SchemeSpec& scheme);

  void step_linear(int k);           // LinearP1 / LinearP2
  void step_semi_implicit_1(int k);  // forcing lagged: f(u^{k-1})
  void step_semi_implicit_2(int k);  // extrapolated: f(2u^{k-1} - u^{k-2}), k >= 2
  void run_startup();                // fills level 1 for SemiImplicit2

  const TimeHistory& history() const { return history_; }
  TimeHistory take_history() { return std::move(history_); }
  const SpectralSpace& space() const { return *space_; }

 private:
  std::vector<double> convolved_history(int k) const;
  std::vector<double> rhs_base(int k) const;
  std::vector<double> nodal_checked(const std::vector<double>& c, int k) const;
  void push_checked(std::vector<double>&& c, int k);

  const SpectralSpace* space_;
  const ProblemSpec* problem_;
  SchemeSpec scheme_;
  double tau_ = 0.0;
  double ct_ = 0.0;     // tau^{-beta}
  double theta_ = 0.0;  // beta/2 for the p=2 schemes, else 0
  BandedOperator lhs_;
  TimeHistory history_;
};

TimeHistory run(const SpectralSpace& space, const ProblemSpec& problem,
                const SchemeSpec& scheme);

}  // namespace subdiff
