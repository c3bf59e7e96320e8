#pragma once

#include <functional>
#include <vector>

namespace subdiff {

// Legendre-Galerkin space on (-1,1) with homogeneous Dirichlet conditions.
// Basis phi_k = L_k - L_{k+2}, k = 0..N-2, so phi_k(+-1) = 0 exactly; the
// stiffness matrix is diagonal and the mass matrix couples modes k and k+2
// only (pentadiagonal in the natural ordering, two decoupled tridiagonal
// systems after even/odd splitting).
struct SpectralSpace {
  int N = 0;
  std::vector<double> nodes;         // N+1 Legendre-Gauss-Lobatto nodes, ascending
  std::vector<double> quad_weights;  // LGL quadrature weights (sum to 2)
  std::vector<double> mass_diag;     // (phi_k, phi_k), k = 0..N-2
  std::vector<double> mass_off;      // (phi_k, phi_{k+2}), k = 0..N-4
  std::vector<double> stiff_diag;    // (phi_k', phi_k') = 4k+6
  std::vector<double> legendre_at_nodes;  // (N+1)x(N+1), row m holds L_m(x_j)
  std::vector<double> gamma_disc;         // discrete norms (L_m, L_m)_N

  int modes() const { return N - 1; }
};

// Builds nodes by Newton iteration on (1-x^2) L_N'(x) from Chebyshev initial
// guesses. Throws std::invalid_argument for N < 2, std::runtime_error if any
// node fails to converge.
SpectralSpace build_space(int N);

struct SpectralFunction {
  const SpectralSpace* space = nullptr;
  std::vector<double> coeff;  // modes() coefficients in the phi basis
};

// Interpolant of f at the LGL nodes, expressed in the phi basis after
// subtracting the linear interpolant of the boundary values.
SpectralFunction interpolate(const SpectralSpace& s,
                             const std::function<double(double)>& f);

// H^1_0-orthogonal projection: solves the (diagonal) stiffness system with
// load (f', phi_k'). Requires f(+-1) = 0.
SpectralFunction h10_project(const SpectralSpace& s,
                             const std::function<double(double)>& f);

double l2_norm(const SpectralFunction& u);

// L2 distance between u and an arbitrary reference function, integrated on a
// refined LGL grid of degree 2N.
double l2_error(const SpectralFunction& u,
                const std::function<double(double)>& ref);

// Same, on a caller-provided quadrature space (reused across many calls).
double l2_error(const SpectralFunction& u,
                const std::function<double(double)>& ref,
                const SpectralSpace& fine);

// Values of u at the N+1 LGL nodes (endpoints included; they are zero up to
// rounding).
std::vector<double> nodal_values(const SpectralFunction& u);
std::vector<double> nodal_values(const SpectralSpace& s,
                                 const std::vector<double>& coeff);

// Member of the space interpolating the given nodal data; the data must
// vanish at the endpoints for the result to reproduce it exactly.
SpectralFunction from_nodal(const SpectralSpace& s,
                            const std::vector<double>& vals);

// Galerkin load vector (I_N g, phi_i) from nodal samples of g, via the
// discrete Legendre transform: load_i = gamma~_i g^_i - gamma~_{i+2} g^_{i+2}.
std::vector<double> load_from_nodal(const SpectralSpace& s,
                                    const std::vector<double>& vals);

void mass_apply(const SpectralSpace& s, const double* c, double* out);

// alpha*M + gamma*S, assembled and factored once; even and odd modes give two
// independent tridiagonal SPD systems solved by the Thomas algorithm.
class BandedOperator {
 public:
  BandedOperator() = default;
  BandedOperator(const SpectralSpace& s, double alpha, double gamma);

  void solve(const double* rhs, double* x) const;
  void apply(const double* c, double* out) const;
  int size() const { return n_; }

 private:
  int n_ = 0;
  std::vector<double> diag_, off_;     // assembled bands (off couples k, k+2)
  std::vector<double> fdiag_, fmult_;  // Thomas factorization, per parity
};

}  // namespace subdiff
