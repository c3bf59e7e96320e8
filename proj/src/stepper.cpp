#include <subdiff/stepper.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <subdiff/kernels.hpp>

namespace subdiff {

namespace {

constexpr double kDivergenceLimit = 1e12;

const LinearForcing& linear_forcing(const ProblemSpec& p) {
  return std::get<LinearForcing>(p.forcing);
}

const NonlinearForcing& nonlinear_forcing(const ProblemSpec& p) {
  return std::get<NonlinearForcing>(p.forcing);
}

void validate(const SpectralSpace& space, const ProblemSpec& p,
              const SchemeSpec& s) {
  if (space.N < 2) throw std::invalid_argument("stepper: invalid space");
  if (!(p.mu > 0.0))
    throw std::invalid_argument("stepper: diffusion coefficient mu must be > 0");
  if (!(p.beta > 0.0 && p.beta < 1.0))
    throw std::invalid_argument("stepper: beta must lie in (0,1)");
  if (!(p.T > 0.0))
    throw std::invalid_argument("stepper: final time T must be > 0");
  if (!p.initial)
    throw std::invalid_argument("stepper: initial condition is not set");
  if (std::abs(p.initial(-1.0)) > 1e-12 || std::abs(p.initial(1.0)) > 1e-12)
    throw std::invalid_argument(
        "stepper: initial condition must vanish at x = +-1");
  if (s.n_steps < 1)
    throw std::invalid_argument("stepper: n_steps must be at least 1");

  const bool linear_scheme =
      s.kind == SchemeKind::LinearP1 || s.kind == SchemeKind::LinearP2;
  if (linear_scheme) {
    if (!std::holds_alternative<LinearForcing>(p.forcing) ||
        !linear_forcing(p).f)
      throw std::invalid_argument(
          "stepper: linear schemes require forcing f(x,t)");
  } else {
    if (!std::holds_alternative<NonlinearForcing>(p.forcing) ||
        !nonlinear_forcing(p).f || !nonlinear_forcing(p).fprime)
      throw std::invalid_argument(
          "stepper: semi-implicit schemes require forcing f(u) with f'");
  }
  if (s.kind == SchemeKind::SemiImplicit2) {
    if (s.n_steps < 2)
      throw std::invalid_argument(
          "stepper: the two-level scheme needs n_steps >= 2");
    if (const auto* r = std::get_if<RefinedFirstStep>(&s.startup);
        r && r->factor < 1)
      throw std::invalid_argument(
          "stepper: refined startup factor must be >= 1");
  }
}

}  // namespace

std::vector<double> caputo_cq_apply(const TimeHistory& history, int k) {
  const auto& lv = history.levels;
  if (lv.empty()) throw std::invalid_argument("caputo_cq_apply: empty history");
  if (k < 0 || k >= static_cast<int>(lv.size()))
    throw std::invalid_argument("caputo_cq_apply: level " + std::to_string(k) +
                                " not present");
  const std::size_t n = lv[0].size();
  const auto& w = history.table.varpi;
  std::vector<double> acc(n, 0.0);
  int j = 0;
  for (; j + 4 <= k + 1; j += 4)
    kernels::weighted_accum4(acc.data(), lv[j].data(), lv[j + 1].data(),
                             lv[j + 2].data(), lv[j + 3].data(), w[k - j],
                             w[k - j - 1], w[k - j - 2], w[k - j - 3], n);
  for (; j <= k; ++j) kernels::axpy(acc.data(), lv[j].data(), w[k - j], n);
  const double ct = std::pow(history.table.tau, -history.table.beta);
  const double bk = history.table.b[k];
  for (std::size_t i = 0; i < n; ++i)
    acc[i] = ct * (acc[i] - bk * lv[0][i]);
  return acc;
}

Stepper::Stepper(const SpectralSpace& space, const ProblemSpec& problem,
                 const SchemeSpec& scheme)
    : space_(&space),
      problem_(&problem),
      scheme_(scheme),
      history_{{}, CoefficientTable(problem.beta, problem.T / scheme.n_steps,
                                    scheme.n_steps)} {
  validate(space, problem, scheme);
  tau_ = problem.T / scheme.n_steps;
  ct_ = std::pow(tau_, -problem.beta);
  const bool p2 = scheme.kind == SchemeKind::LinearP2 ||
                  scheme.kind == SchemeKind::SemiImplicit2;
  theta_ = p2 ? 0.5 * problem.beta : 0.0;
  lhs_ = BandedOperator(space, ct_, problem.mu * (1.0 - theta_));
  history_.levels.reserve(scheme.n_steps + 1);
  history_.levels.push_back(interpolate(space, problem.initial).coeff);
}

std::vector<double> Stepper::convolved_history(int k) const {
  const auto& lv = history_.levels;
  const auto& w = history_.table.varpi;
  const std::size_t n = lv[0].size();
  std::vector<double> conv(n, 0.0);
  int j = 0;
  for (; j + 4 <= k; j += 4)
    kernels::weighted_accum4(conv.data(), lv[j].data(), lv[j + 1].data(),
                             lv[j + 2].data(), lv[j + 3].data(), w[k - j],
                             w[k - j - 1], w[k - j - 2], w[k - j - 3], n);
  for (; j < k; ++j) kernels::axpy(conv.data(), lv[j].data(), w[k - j], n);
  return conv;
}

// tau^{-beta} M (b_k u^0 - sum_{j<k} varpi_{k-j} u^j): the history side of the
// discrete fractional derivative, shared by every scheme.
std::vector<double> Stepper::rhs_base(int k) const {
  std::vector<double> v = convolved_history(k);
  const auto& c0 = history_.levels[0];
  const double bk = history_.table.b[k];
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = bk * c0[i] - v[i];
  std::vector<double> rhs(v.size());
  mass_apply(*space_, v.data(), rhs.data());
  for (double& r : rhs) r *= ct_;
  return rhs;
}

std::vector<double> Stepper::nodal_checked(const std::vector<double>& c,
                                           int k) const {
  std::vector<double> vals = nodal_values(*space_, c);
  for (double v : vals)
    if (!std::isfinite(v) || std::abs(v) > kDivergenceLimit)
      throw solver_error("solution diverged: nodal magnitude exceeds 1e12", k);
  return vals;
}

void Stepper::push_checked(std::vector<double>&& c, int k) {
  for (double v : c)
    if (!std::isfinite(v) || std::abs(v) > kDivergenceLimit)
      throw solver_error("solution diverged", k);
  history_.levels.push_back(std::move(c));
}

void Stepper::step_linear(int k) {
  if (k != static_cast<int>(history_.levels.size()))
    throw std::invalid_argument("step_linear: steps must advance in order");
  const auto& f = linear_forcing(*problem_).f;
  const int N = space_->N;
  std::vector<double> g(N + 1);
  if (scheme_.kind == SchemeKind::LinearP1) {
    const double t = k * tau_;
    for (int j = 0; j <= N; ++j) g[j] = f(space_->nodes[j], t);
  } else {
    // p=2: load evaluated at the shifted time level (1-theta) f^k + theta f^{k-1}
    const double tk = k * tau_, tk1 = (k - 1) * tau_;
    for (int j = 0; j <= N; ++j)
      g[j] = (1.0 - theta_) * f(space_->nodes[j], tk) +
             theta_ * f(space_->nodes[j], tk1);
  }
  std::vector<double> rhs = rhs_base(k);
  const std::vector<double> load = load_from_nodal(*space_, g);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += load[i];
  if (theta_ != 0.0) {
    const auto& prev = history_.levels[k - 1];
    for (std::size_t i = 0; i < rhs.size(); ++i)
      rhs[i] -= problem_->mu * theta_ * space_->stiff_diag[i] * prev[i];
  }
  std::vector<double> c(rhs.size());
  lhs_.solve(rhs.data(), c.data());
  push_checked(std::move(c), k);
}

void Stepper::step_semi_implicit_1(int k) {
  if (k != static_cast<int>(history_.levels.size()))
    throw std::invalid_argument(
        "step_semi_implicit_1: steps must advance in order");
  const auto& f = nonlinear_forcing(*problem_).f;
  std::vector<double> g = nodal_checked(history_.levels[k - 1], k);
  for (double& v : g) v = f(v);
  std::vector<double> rhs = rhs_base(k);
  const std::vector<double> load = load_from_nodal(*space_, g);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += load[i];
  std::vector<double> c(rhs.size());
  lhs_.solve(rhs.data(), c.data());
  push_checked(std::move(c), k);
}

void Stepper::step_semi_implicit_2(int k) {
  if (k < 2)
    throw std::invalid_argument(
        "step_semi_implicit_2: needs two history levels (k >= 2)");
  if (k != static_cast<int>(history_.levels.size()))
    throw std::invalid_argument(
        "step_semi_implicit_2: steps must advance in order");
  const auto& f = nonlinear_forcing(*problem_).f;
  const auto& prev = history_.levels[k - 1];
  const auto& prev2 = history_.levels[k - 2];
  std::vector<double> extrap(prev.size());
  kernels::combine2(extrap.data(), prev.data(), prev2.data(), 2.0, -1.0,
                    prev.size());
  const std::vector<double> ue = nodal_checked(extrap, k);
  const std::vector<double> up = nodal_checked(prev, k);
  std::vector<double> g(ue.size());
  for (std::size_t j = 0; j < g.size(); ++j)
    g[j] = (1.0 - theta_) * f(ue[j]) + theta_ * f(up[j]);
  std::vector<double> rhs = rhs_base(k);
  const std::vector<double> load = load_from_nodal(*space_, g);
  for (std::size_t i = 0; i < rhs.size(); ++i)
    rhs[i] += load[i] - problem_->mu * theta_ * space_->stiff_diag[i] * prev[i];
  std::vector<double> c(rhs.size());
  lhs_.solve(rhs.data(), c.data());
  push_checked(std::move(c), k);
}

void Stepper::run_startup() {
  if (scheme_.kind != SchemeKind::SemiImplicit2)
    throw std::invalid_argument("run_startup: only the two-level scheme has one");
  if (history_.levels.size() != 1)
    throw std::invalid_argument("run_startup: level 1 already computed");

  if (const auto* r = std::get_if<RefinedFirstStep>(&scheme_.startup)) {
    // One SemiImplicit1 sub-run across [0, tau] with its own, finer table.
    ProblemSpec sub = *problem_;
    sub.T = tau_;
    SchemeSpec ss;
    ss.kind = SchemeKind::SemiImplicit1;
    ss.n_steps = r->factor;
    try {
      TimeHistory h = run(*space_, sub, ss);
      history_.levels.push_back(std::move(h.levels.back()));
    } catch (const solver_error& e) {
      throw solver_error(std::string("startup sub-run failed: ") + e.what(), 1);
    }
    return;
  }

  // Implicit first step: fixed-point iteration on the frozen linear solve
  // (tau^{-beta} M + mu S) u = load(f(u)) + history terms.
  const auto& fc = nonlinear_forcing(*problem_);
  const BandedOperator op(*space_, ct_, problem_->mu);
  const std::vector<double> base = rhs_base(1);
  std::vector<double> guess = history_.levels[0];
  std::vector<double> c(guess.size());
  for (int it = 0; it < 200; ++it) {
    std::vector<double> g = nodal_checked(guess, 1);
    for (double& v : g) v = fc.f(v);
    std::vector<double> rhs = base;
    const std::vector<double> load = load_from_nodal(*space_, g);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += load[i];
    op.solve(rhs.data(), c.data());
    double delta = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      delta = std::max(delta, std::abs(c[i] - guess[i]));
      scale = std::max(scale, std::abs(c[i]));
    }
    guess = c;
    if (delta <= 1e-13 * scale) {
      push_checked(std::move(guess), 1);
      return;
    }
  }
  // Report the local contraction scale so a divergent fixed point is
  // distinguishable from a merely slow one.
  double lip = 0.0;
  for (double v : nodal_checked(guess, 1))
    lip = std::max(lip, std::abs(fc.fprime(v)));
  throw solver_error("implicit first step did not converge; contraction scale "
                     "tau^beta*max|f'| = " +
                         std::to_string(std::pow(tau_, problem_->beta) * lip),
                     1);
}

TimeHistory run(const SpectralSpace& space, const ProblemSpec& problem,
                const SchemeSpec& scheme) {
  Stepper st(space, problem, scheme);
  const int n = scheme.n_steps;
  switch (scheme.kind) {
    case SchemeKind::LinearP1:
    case SchemeKind::LinearP2:
      for (int k = 1; k <= n; ++k) st.step_linear(k);
      break;
    case SchemeKind::SemiImplicit1:
      for (int k = 1; k <= n; ++k) st.step_semi_implicit_1(k);
      break;
    case SchemeKind::SemiImplicit2:
      st.run_startup();
      for (int k = 2; k <= n; ++k) st.step_semi_implicit_2(k);
      break;
  }
  return st.take_history();
}

}  // namespace subdiff
