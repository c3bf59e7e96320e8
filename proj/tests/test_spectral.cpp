#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <subdiff/spectral.hpp>

#include "oracles.hpp"

using namespace subdiff;

TEST_CASE("N=2 space has the textbook values") {
  const SpectralSpace s = build_space(2);
  REQUIRE(s.N == 2);
  REQUIRE(s.modes() == 1);
  CHECK(s.nodes[0] == -1.0);
  CHECK(std::abs(s.nodes[1]) <= 1e-15);
  CHECK(s.nodes[2] == 1.0);
  CHECK(s.quad_weights[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(s.quad_weights[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(s.quad_weights[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(s.stiff_diag[0] == 6.0);
  CHECK(s.mass_diag[0] == doctest::Approx(12.0 / 5.0).epsilon(1e-15));
}

TEST_CASE("N=4 nodes and weights") {
  const SpectralSpace s = build_space(4);
  const double r = std::sqrt(3.0 / 7.0);
  CHECK(s.nodes[1] == doctest::Approx(-r).epsilon(1e-14));
  CHECK(std::abs(s.nodes[2]) <= 1e-15);
  CHECK(s.nodes[3] == doctest::Approx(r).epsilon(1e-14));
  CHECK(s.quad_weights[0] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(s.quad_weights[1] == doctest::Approx(49.0 / 90.0).epsilon(1e-14));
  CHECK(s.quad_weights[2] == doctest::Approx(32.0 / 45.0).epsilon(1e-14));
}

TEST_CASE("quadrature weights sum to 2 and integrate degree 2N-1 exactly") {
  for (int N : {2, 3, 4, 8, 16, 33, 64, 128}) {
    const SpectralSpace s = build_space(N);
    double wsum = 0.0, odd = 0.0, even = 0.0;
    for (int j = 0; j <= N; ++j) {
      wsum += s.quad_weights[j];
      odd += s.quad_weights[j] * std::pow(s.nodes[j], 2 * N - 1);
      even += s.quad_weights[j] * std::pow(s.nodes[j], 2 * N - 2);
    }
    CHECK(std::abs(wsum - 2.0) <= 1e-13);
    CHECK(std::abs(odd) <= 1e-13);
    CHECK(even == doctest::Approx(2.0 / (2.0 * N - 1.0)).epsilon(1e-12));

    // node symmetry and ordering
    for (int j = 0; j <= N; ++j)
      CHECK(std::abs(s.nodes[j] + s.nodes[N - j]) <= 1e-15);
    // tabulated Legendre values match the oracle recurrence
    for (int m = 0; m <= N; m += std::max(1, N / 5))
      for (int j = 0; j <= N; ++j)
        CHECK(s.legendre_at_nodes[m * (N + 1) + j] ==
              doctest::Approx(oracles::legendre(m, s.nodes[j])).epsilon(1e-13));
  }
}

TEST_CASE("mass and stiffness entries against direct integration") {
  const SpectralSpace s = build_space(8);
  auto phi = [](int k, double x) {
    return oracles::legendre(k, x) - oracles::legendre(k + 2, x);
  };
  auto dphi = [](int k, double x) {
    return oracles::legendre_derivative(k, x) -
           oracles::legendre_derivative(k + 2, x);
  };
  for (int k = 0; k < s.modes(); ++k) {
    const double mkk =
        oracles::integrate([&](double x) { return phi(k, x) * phi(k, x); },
                           -1.0, 1.0);
    // derivative products reach ~3e3 near the endpoints, so an absolute
    // quadrature goal much below 1e-10 would chase rounding noise
    const double skk =
        oracles::integrate([&](double x) { return dphi(k, x) * dphi(k, x); },
                           -1.0, 1.0, 1e-10);
    CHECK(s.mass_diag[k] == doctest::Approx(mkk).epsilon(1e-12));
    CHECK(s.stiff_diag[k] == doctest::Approx(skk).epsilon(1e-10));
    if (k + 2 < s.modes()) {
      const double mk2 = oracles::integrate(
          [&](double x) { return phi(k, x) * phi(k + 2, x); }, -1.0, 1.0);
      CHECK(s.mass_off[k] == doctest::Approx(mk2).epsilon(1e-12));
    }
  }
}

TEST_CASE("interpolation reproduces members of the space") {
  const SpectralSpace s = build_space(12);
  auto rng = oracles::rng(4001);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> c(s.modes());
  for (double& x : c) x = dist(rng);
  const SpectralFunction u{&s, c};
  const std::vector<double> vals = nodal_values(u);

  // endpoints are exact zeros of the basis
  CHECK(std::abs(vals[0]) <= 1e-12);
  CHECK(std::abs(vals[s.N]) <= 1e-12);

  const SpectralFunction v = from_nodal(s, vals);
  for (int k = 0; k < s.modes(); ++k)
    CHECK(std::abs(v.coeff[k] - c[k]) <= 1e-12);
}

TEST_CASE("interpolation lifts inhomogeneous boundary values") {
  const SpectralSpace s = build_space(16);
  const SpectralFunction u = interpolate(s, [](double x) { return std::exp(x); });
  const std::vector<double> vals = nodal_values(u);
  const double em = std::exp(-1.0), ep = std::exp(1.0);
  for (int j = 0; j <= s.N; ++j) {
    const double x = s.nodes[j];
    const double lifted = std::exp(x) - 0.5 * ((1.0 - x) * em + (1.0 + x) * ep);
    CHECK(std::abs(vals[j] - lifted) <= 1e-12);
  }
}

TEST_CASE("H^1_0 projection: reproduction, orthogonality, singular decay") {
  SUBCASE("projection is the identity on the space") {
    const SpectralSpace s = build_space(10);
    auto f = [](double x) { return (1.0 - x * x) * (0.3 + x - 2.0 * x * x); };
    const SpectralFunction pf = h10_project(s, f);
    const SpectralFunction in = interpolate(s, f);
    for (int k = 0; k < s.modes(); ++k)
      CHECK(std::abs(pf.coeff[k] - in.coeff[k]) <= 1e-12);
  }
  SUBCASE("residual derivative is orthogonal to the basis") {
    const SpectralSpace s = build_space(12);
    auto f = [](double x) { return std::sin(M_PI * x) * (1.0 + 0.5 * x); };
    const SpectralFunction pf = h10_project(s, f);
    // (f' - (Pf)', phi_k') via the oracle integrator, for a few k
    for (int k : {0, 3, 7}) {
      auto dphi = [k](double x) {
        return oracles::legendre_derivative(k, x) -
               oracles::legendre_derivative(k + 2, x);
      };
      auto dpf = [&](double x) {
        double acc = 0.0;
        for (int m = 0; m < s.modes(); ++m)
          acc += pf.coeff[m] * (oracles::legendre_derivative(m, x) -
                                oracles::legendre_derivative(m + 2, x));
        return acc;
      };
      auto df = [](double x) {
        return M_PI * std::cos(M_PI * x) * (1.0 + 0.5 * x) +
               0.5 * std::sin(M_PI * x);
      };
      const double resid = oracles::integrate(
          [&](double x) { return (df(x) - dpf(x)) * dphi(x); }, -1.0, 1.0,
          1e-11);
      CHECK(std::abs(resid) <= 1e-10);
    }
  }
  SUBCASE("algebraic decay for a function of limited smoothness") {
    // |x|^{5/2}(1-x^2) sits in H^3-epsilon; the projection error in L2
    // should decay roughly like N^{-3}.
    auto f = [](double x) {
      return std::pow(std::abs(x), 2.5) * (1.0 - x * x);
    };
    std::vector<double> errs;
    for (int N : {8, 16, 32, 64}) {
      const SpectralSpace s = build_space(N);
      errs.push_back(l2_error(h10_project(s, f), f));
    }
    for (std::size_t i = 1; i < errs.size(); ++i) {
      const double slope = std::log2(errs[i] / errs[i - 1]);
      CHECK(slope <= -2.3);
      CHECK(slope >= -4.0);
    }
  }
}

TEST_CASE("L2 norms and errors") {
  const SpectralSpace s = build_space(32);
  const SpectralFunction u = interpolate(s, [](double x) {
    return std::sin(M_PI * x);
  });
  CHECK(l2_norm(u) == doctest::Approx(1.0).epsilon(1e-12));

  // cross-check the quadrature-based error against adaptive Simpson
  const SpectralFunction w = interpolate(s, [](double x) {
    return (1.0 - x * x) * std::exp(x);
  });
  auto ref = [](double x) { return std::cos(0.5 * M_PI * x); };
  const double viaquad = l2_error(w, ref);
  const double viasimpson = std::sqrt(oracles::integrate(
      [&](double x) {
        double acc = 0.0;
        for (int m = 0; m < s.modes(); ++m)
          acc += w.coeff[m] *
                 (oracles::legendre(m, x) - oracles::legendre(m + 2, x));
        const double d = acc - ref(x);
        return d * d;
      },
      -1.0, 1.0, 1e-12));
  CHECK(viaquad == doctest::Approx(viasimpson).epsilon(1e-9));
}

TEST_CASE("banded operator solves and applies consistently") {
  const SpectralSpace s = build_space(24);
  const BandedOperator op(s, 3.7, 0.9);
  auto rng = oracles::rng(4002);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<double> rhs(s.modes()), x(s.modes()), back(s.modes());
  for (double& v : rhs) v = dist(rng);
  op.solve(rhs.data(), x.data());
  op.apply(x.data(), back.data());
  for (int k = 0; k < s.modes(); ++k)
    CHECK(std::abs(back[k] - rhs[k]) <= 1e-11 * (1.0 + std::abs(rhs[k])));

  // mass_apply is the alpha=1, gamma=0 special case
  const BandedOperator mass(s, 1.0, 0.0);
  std::vector<double> m1(s.modes()), m2(s.modes());
  mass.apply(rhs.data(), m1.data());
  mass_apply(s, rhs.data(), m2.data());
  for (int k = 0; k < s.modes(); ++k) CHECK(m1[k] == m2[k]);
}

TEST_CASE("load vector equals the discrete inner product") {
  const SpectralSpace s = build_space(9);
  std::vector<double> g(s.N + 1);
  for (int j = 0; j <= s.N; ++j) g[j] = std::tanh(2.0 * s.nodes[j]);
  const std::vector<double> load = load_from_nodal(s, g);
  for (int i = 0; i < s.modes(); ++i) {
    double direct = 0.0;
    for (int j = 0; j <= s.N; ++j)
      direct += s.quad_weights[j] * g[j] *
                (oracles::legendre(i, s.nodes[j]) -
                 oracles::legendre(i + 2, s.nodes[j]));
    CHECK(std::abs(load[i] - direct) <= 1e-13 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(build_space(1), std::invalid_argument);
  CHECK_THROWS_AS(build_space(0), std::invalid_argument);
  CHECK_THROWS_AS(build_space(-3), std::invalid_argument);

  const SpectralSpace s = build_space(4);
  CHECK_THROWS_AS(from_nodal(s, std::vector<double>(3, 0.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(h10_project(s, [](double x) { return x + 2.0; }),
                  std::invalid_argument);
  SpectralFunction unbound;
  CHECK_THROWS_AS(l2_norm(unbound), std::invalid_argument);
}
