#include <subdiff/spectral.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

#include <subdiff/kernels.hpp>

namespace subdiff {

namespace {

// L_N(x) and L_N'(x) by the three-term recurrence; the derivative uses
// (x^2 - 1) L_N' = N (x L_N - L_{N-1}), valid away from the endpoints.
void legendre_with_derivative(int N, double x, double& LN, double& dLN) {
  double pm1 = 1.0, p = x;
  if (N == 0) {
    LN = 1.0;
    dLN = 0.0;
    return;
  }
  for (int k = 2; k <= N; ++k) {
    const double pn = ((2.0 * k - 1.0) * x * p - (k - 1.0) * pm1) / k;
    pm1 = p;
    p = pn;
  }
  LN = p;
  dLN = N * (x * p - pm1) / (x * x - 1.0);
}

double continuous_gamma(int m) { return 2.0 / (2.0 * m + 1.0); }

// Discrete Legendre coefficients of nodal data: a_m = (g, L_m)_N / gamma~_m.
std::vector<double> legendre_coeffs(const SpectralSpace& s,
                                    const std::vector<double>& vals) {
  const int N = s.N;
  std::vector<double> wg(N + 1);
  for (int j = 0; j <= N; ++j) wg[j] = s.quad_weights[j] * vals[j];
  std::vector<double> a(N + 1);
  for (int m = 0; m <= N; ++m)
    a[m] = kernels::dot(&s.legendre_at_nodes[m * (N + 1)], wg.data(), N + 1) /
           s.gamma_disc[m];
  return a;
}

// phi coefficients -> Legendre coefficients: a_m = c_m - c_{m-2}.
std::vector<double> phi_to_legendre(const SpectralSpace& s,
                                    const std::vector<double>& c) {
  const int N = s.N;
  std::vector<double> a(N + 1, 0.0);
  for (int m = 0; m <= N; ++m) {
    double v = 0.0;
    if (m <= N - 2) v += c[m];
    if (m >= 2) v -= c[m - 2];
    a[m] = v;
  }
  return a;
}

// Sum of a_m L_m at the nodes of `s` for coefficients a_0..a_top.
std::vector<double> evaluate_legendre_sum(const SpectralSpace& s,
                                          const std::vector<double>& a,
                                          int top) {
  const int n = s.N + 1;
  std::vector<double> vals(n, 0.0);
  int m = 0;
  for (; m + 4 <= top + 1; m += 4)
    kernels::weighted_accum4(vals.data(), &s.legendre_at_nodes[m * n],
                             &s.legendre_at_nodes[(m + 1) * n],
                             &s.legendre_at_nodes[(m + 2) * n],
                             &s.legendre_at_nodes[(m + 3) * n], a[m], a[m + 1],
                             a[m + 2], a[m + 3], n);
  for (; m <= top; ++m)
    kernels::axpy(vals.data(), &s.legendre_at_nodes[m * n], a[m], n);
  return vals;
}

void check_same_space(const SpectralFunction& u) {
  if (!u.space || static_cast<int>(u.coeff.size()) != u.space->modes())
    throw std::invalid_argument("spectral function is not bound to a space");
}

}  // namespace

SpectralSpace build_space(int N) {
  if (N < 2)
    throw std::invalid_argument("spectral degree N must be at least 2, got " +
                                std::to_string(N));
  SpectralSpace s;
  s.N = N;
  s.nodes.assign(N + 1, 0.0);
  s.nodes[0] = -1.0;
  s.nodes[N] = 1.0;

  // Interior LGL nodes are the roots of L_N'; Newton from Chebyshev-Lobatto
  // guesses, using L_N'' = (2x L_N' - N(N+1) L_N) / (1 - x^2).
  const double nn1 = static_cast<double>(N) * (N + 1);
  for (int i = 1; i < N; ++i) {
    double x = -std::cos(M_PI * i / N);
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      double LN, dLN;
      legendre_with_derivative(N, x, LN, dLN);
      const double d2LN = (2.0 * x * dLN - nn1 * LN) / (1.0 - x * x);
      const double dx = dLN / d2LN;
      x -= dx;
      if (std::abs(dx) <= 1e-14) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw std::runtime_error("LGL node iteration failed to converge (N=" +
                               std::to_string(N) + ", node " +
                               std::to_string(i) + ")");
    s.nodes[i] = x;
  }
  // Symmetrize: the node set is exactly antisymmetric.
  for (int i = 0; 2 * i <= N; ++i) {
    const double m = 0.5 * (s.nodes[i] - s.nodes[N - i]);
    s.nodes[i] = m;
    s.nodes[N - i] = -m;
  }
  for (int i = 0; i < N; ++i)
    if (!(s.nodes[i] < s.nodes[i + 1]))
      throw std::runtime_error("LGL nodes are not strictly ascending (N=" +
                               std::to_string(N) + ")");

  s.quad_weights.assign(N + 1, 0.0);
  s.legendre_at_nodes.assign((N + 1) * (N + 1), 0.0);
  for (int j = 0; j <= N; ++j) {
    const double x = s.nodes[j];
    double pm1 = 1.0, p = x;
    s.legendre_at_nodes[0 * (N + 1) + j] = 1.0;
    s.legendre_at_nodes[1 * (N + 1) + j] = x;
    for (int m = 2; m <= N; ++m) {
      const double pn = ((2.0 * m - 1.0) * x * p - (m - 1.0) * pm1) / m;
      pm1 = p;
      p = pn;
      s.legendre_at_nodes[m * (N + 1) + j] = pn;
    }
    const double LN = s.legendre_at_nodes[N * (N + 1) + j];
    s.quad_weights[j] = 2.0 / (nn1 * LN * LN);
  }

  s.gamma_disc.assign(N + 1, 0.0);
  for (int m = 0; m < N; ++m) s.gamma_disc[m] = continuous_gamma(m);
  s.gamma_disc[N] = 2.0 / N;

  const int n = N - 1;
  s.mass_diag.assign(n, 0.0);
  s.stiff_diag.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    s.mass_diag[k] = continuous_gamma(k) + continuous_gamma(k + 2);
    s.stiff_diag[k] = 4.0 * k + 6.0;
  }
  s.mass_off.assign(n >= 2 ? n - 2 : 0, 0.0);
  for (int k = 0; k + 2 < n; ++k) s.mass_off[k] = -continuous_gamma(k + 2);
  return s;
}

SpectralFunction from_nodal(const SpectralSpace& s,
                            const std::vector<double>& vals) {
  if (static_cast<int>(vals.size()) != s.N + 1)
    throw std::invalid_argument("from_nodal: expected " +
                                std::to_string(s.N + 1) + " nodal values");
  const std::vector<double> a = legendre_coeffs(s, vals);
  SpectralFunction u;
  u.space = &s;
  u.coeff.assign(s.modes(), 0.0);
  // Invert a_m = c_m - c_{m-2} forward in m.
  for (int m = 0; m < s.modes(); ++m)
    u.coeff[m] = a[m] + (m >= 2 ? u.coeff[m - 2] : 0.0);
  return u;
}

SpectralFunction interpolate(const SpectralSpace& s,
                             const std::function<double(double)>& f) {
  if (!f) throw std::invalid_argument("interpolate: null function");
  std::vector<double> vals(s.N + 1);
  for (int j = 0; j <= s.N; ++j) vals[j] = f(s.nodes[j]);
  // Subtract the linear interpolant of the boundary values so the remainder
  // lies in the homogeneous space.
  const double fm = vals[0], fp = vals[s.N];
  if (fm != 0.0 || fp != 0.0)
    for (int j = 0; j <= s.N; ++j) {
      const double x = s.nodes[j];
      vals[j] -= 0.5 * ((1.0 - x) * fm + (1.0 + x) * fp);
    }
  vals[0] = 0.0;
  vals[s.N] = 0.0;
  return from_nodal(s, vals);
}

SpectralFunction h10_project(const SpectralSpace& s,
                             const std::function<double(double)>& f) {
  if (!f) throw std::invalid_argument("h10_project: null function");
  if (std::abs(f(-1.0)) > 1e-12 || std::abs(f(1.0)) > 1e-12)
    throw std::invalid_argument("h10_project: f must vanish at x = +-1");
  // Load (f', phi_k') via the degree-2N LGL interpolant of f: its Legendre
  // derivative coefficients give the quadrature-exact inner products against
  // phi_k' = -(2k+3) L_{k+1}, and the stiffness system is diagonal.
  const int M = 2 * s.N;
  const SpectralSpace fine = build_space(M);
  std::vector<double> vals(M + 1);
  for (int j = 0; j <= M; ++j) vals[j] = f(fine.nodes[j]);
  const std::vector<double> a = legendre_coeffs(fine, vals);
  std::vector<double> d(M + 2, 0.0);  // coefficients of (I_M f)'
  // d_{m-1}/(2m-1) = d_{m+1}/(2m+3) + a_m, from L'_{m+1} - L'_{m-1} = (2m+1) L_m.
  for (int m = M; m >= 1; --m)
    d[m - 1] = (2.0 * m - 1.0) * (d[m + 1] / (2.0 * m + 3.0) + a[m]);
  SpectralFunction u;
  u.space = &s;
  u.coeff.assign(s.modes(), 0.0);
  for (int k = 0; k < s.modes(); ++k) u.coeff[k] = -d[k + 1] / (2.0 * k + 3.0);
  return u;
}

std::vector<double> nodal_values(const SpectralFunction& u) {
  check_same_space(u);
  const SpectralSpace& s = *u.space;
  return evaluate_legendre_sum(s, phi_to_legendre(s, u.coeff), s.N);
}

std::vector<double> nodal_values(const SpectralSpace& s,
                                 const std::vector<double>& coeff) {
  if (static_cast<int>(coeff.size()) != s.modes())
    throw std::invalid_argument("nodal_values: coefficient size mismatch");
  return evaluate_legendre_sum(s, phi_to_legendre(s, coeff), s.N);
}

std::vector<double> load_from_nodal(const SpectralSpace& s,
                                    const std::vector<double>& vals) {
  if (static_cast<int>(vals.size()) != s.N + 1)
    throw std::invalid_argument("load_from_nodal: expected " +
                                std::to_string(s.N + 1) + " nodal values");
  const std::vector<double> a = legendre_coeffs(s, vals);
  std::vector<double> load(s.modes());
  // (I_N g, phi_i) = gamma~_i a_i - gamma~_{i+2} a_{i+2}
  for (int i = 0; i < s.modes(); ++i)
    load[i] = s.gamma_disc[i] * a[i] - s.gamma_disc[i + 2] * a[i + 2];
  return load;
}

void mass_apply(const SpectralSpace& s, const double* c, double* out) {
  const int n = s.modes();
  for (int k = 0; k < n; ++k) {
    double v = s.mass_diag[k] * c[k];
    if (k + 2 < n) v += s.mass_off[k] * c[k + 2];
    if (k >= 2) v += s.mass_off[k - 2] * c[k - 2];
    out[k] = v;
  }
}

double l2_norm(const SpectralFunction& u) {
  check_same_space(u);
  const SpectralSpace& s = *u.space;
  const int n = s.modes();
  double q = 0.0;
  for (int k = 0; k < n; ++k) q += s.mass_diag[k] * u.coeff[k] * u.coeff[k];
  for (int k = 0; k + 2 < n; ++k)
    q += 2.0 * s.mass_off[k] * u.coeff[k] * u.coeff[k + 2];
  return std::sqrt(q > 0.0 ? q : 0.0);
}

double l2_error(const SpectralFunction& u,
                const std::function<double(double)>& ref,
                const SpectralSpace& fine) {
  check_same_space(u);
  if (!ref) throw std::invalid_argument("l2_error: null reference");
  if (fine.N < u.space->N)
    throw std::invalid_argument("l2_error: quadrature space too coarse");
  const std::vector<double> a = phi_to_legendre(*u.space, u.coeff);
  const std::vector<double> vals = evaluate_legendre_sum(fine, a, u.space->N);
  double q = 0.0;
  for (int j = 0; j <= fine.N; ++j) {
    const double diff = vals[j] - ref(fine.nodes[j]);
    q += fine.quad_weights[j] * diff * diff;
  }
  return std::sqrt(q > 0.0 ? q : 0.0);
}

double l2_error(const SpectralFunction& u,
                const std::function<double(double)>& ref) {
  check_same_space(u);
  return l2_error(u, ref, build_space(2 * u.space->N));
}

BandedOperator::BandedOperator(const SpectralSpace& s, double alpha,
                               double gamma) {
  n_ = s.modes();
  diag_.assign(n_, 0.0);
  off_.assign(n_ >= 2 ? n_ - 2 : 0, 0.0);
  for (int k = 0; k < n_; ++k)
    diag_[k] = alpha * s.mass_diag[k] + gamma * s.stiff_diag[k];
  for (int k = 0; k + 2 < n_; ++k) off_[k] = alpha * s.mass_off[k];
  fdiag_.assign(n_, 0.0);
  fmult_.assign(n_, 0.0);
  for (int p = 0; p < 2 && p < n_; ++p)
    for (int i = p; i < n_; i += 2) {
      double d = diag_[i];
      if (i >= 2) {
        fmult_[i] = off_[i - 2] / fdiag_[i - 2];
        d -= fmult_[i] * off_[i - 2];
      }
      if (!(d > 0.0))
        throw std::runtime_error(
            "banded operator is not positive definite (mode " +
            std::to_string(i) + ")");
      fdiag_[i] = d;
    }
}

void BandedOperator::solve(const double* rhs, double* x) const {
  for (int p = 0; p < 2 && p < n_; ++p) {
    int last = p;
    for (int i = p; i < n_; i += 2) {
      x[i] = rhs[i] - (i >= 2 ? fmult_[i] * x[i - 2] : 0.0);
      last = i;
    }
    for (int i = last; i >= p; i -= 2) {
      double v = x[i];
      if (i + 2 < n_) v -= off_[i] * x[i + 2];
      x[i] = v / fdiag_[i];
    }
  }
}

void BandedOperator::apply(const double* c, double* out) const {
  for (int k = 0; k < n_; ++k) {
    double v = diag_[k] * c[k];
    if (k + 2 < n_) v += off_[k] * c[k + 2];
    if (k >= 2) v += off_[k - 2] * c[k - 2];
    out[k] = v;
  }
}

}  // namespace subdiff
