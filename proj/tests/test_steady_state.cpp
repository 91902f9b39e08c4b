#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "sense/steady_state.hpp"
#include "test_helpers.hpp"

using namespace sense;
using Catch::Approx;

namespace {

// Residual of the steady-state equations: plug the solution back into the
// stationary Langevin set. Independent of the solver path.
double steady_residual(const SystemParams& p, const SteadyState& s, double Delta_a_used) {
  const std::complex<double> i(0.0, 1.0);
  const double E_L = drive_amplitude(p);
  const std::complex<double> eq_a =
      -(i * (Delta_a_used + p.g0 * s.X1_bar) + 0.5 * p.kappa) * s.alpha + E_L +
      2.0 * p.G * std::exp(i * p.theta) * std::conj(s.alpha);
  const double eq_p1 = -p.omega_m1 * s.X1_bar - p.g0 * s.N_ave - p.lambda * s.X2_bar;
  const double eq_p2 = -p.omega_m2 * s.X2_bar - p.lambda * s.X1_bar;
  const double scale = std::max({std::abs(E_L), p.kappa * s.alpha_abs, 1.0});
  return std::max({std::abs(eq_a) / scale, std::abs(eq_p1) / std::max(1.0, p.g0 * s.N_ave),
                   std::abs(eq_p2) / std::max(1.0, p.g0 * s.N_ave)});
}

}  // namespace

TEST_CASE("figure mode reproduces the closed forms at theta = 0") {
  SECTION("G = 0: alpha = 2 E_L / kappa, real") {
    SystemParams p = testing::base_internal();
    const SteadyState s = testing::figure_steady(p);
    REQUIRE(s.alpha.real() == Approx(2.0 * *p.E_L / p.kappa).epsilon(1e-14));
    REQUIRE(s.alpha.imag() == 0.0);
    REQUIRE(s.phi == 0.0);
    REQUIRE(s.Delta_eff == 0.0);
  }
  SECTION("G = 0.2 kappa: alpha = 10 E_L / kappa") {
    SystemParams p = testing::base_internal(0.0, 0.2);
    const SteadyState s = testing::figure_steady(p);
    REQUIRE(s.alpha.real() == Approx(10.0 * *p.E_L / p.kappa).epsilon(1e-14));
    REQUIRE(s.alpha.imag() == 0.0);
  }
  SECTION("photon number amplification ratio is exactly 25") {
    const SteadyState s0 = testing::figure_steady(testing::base_internal(0.0, 0.0));
    const SteadyState s2 = testing::figure_steady(testing::base_internal(0.0, 0.2));
    REQUIRE(s2.N_ave / s0.N_ave == Approx(25.0).epsilon(1e-13));
  }
}

TEST_CASE("steady state satisfies the stationary equations to 1e-12") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ul(0.0, 0.3), ug(0.0, 0.24), ut(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    SystemParams p = testing::base_internal(ul(rng), ug(rng));
    p.theta = ut(rng);
    const SteadyState s = testing::figure_steady(p);
    // figure mode fixes Delta' = 0, i.e. Delta_a = -g0 X1_bar
    REQUIRE(steady_residual(p, s, -p.g0 * s.X1_bar) < 1e-12);
  }
}

TEST_CASE("phase of alpha matches the closed-form arctangent") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> ug(0.0, 0.24), ut(-3.0, 3.0), ud(-20.0, 20.0);
  for (int trial = 0; trial < 100; ++trial) {
    SystemParams p = testing::base_internal(0.0, ug(rng));
    p.theta = ut(rng);
    const double d_eff = ud(rng);
    // interrogate the closed-form at fixed effective detuning
    const std::complex<double> a = detail::alpha_of_delta(p, d_eff, *p.E_L);
    const double lhs = std::arg(a);
    const double rhs = std::atan2(4.0 * p.G * std::sin(p.theta) - 2.0 * d_eff,
                                  4.0 * p.G * std::cos(p.theta) + p.kappa);
    if (d_eff * d_eff + 0.25 * p.kappa * p.kappa - 4.0 * p.G * p.G > 0.0) {
      REQUIRE(std::abs(std::remainder(lhs - rhs, 2.0 * constants::pi)) < 1e-10);
    }
  }
}

TEST_CASE("mean displacements follow the lambda structure") {
  SECTION("lambda = 0: X2 = 0, X1 = -g0 |alpha|^2 / omega_m1") {
    SystemParams p = testing::base_internal(0.0, 0.1);
    const SteadyState s = testing::figure_steady(p);
    REQUIRE(s.X2_bar == 0.0);
    REQUIRE(s.X1_bar == Approx(-p.g0 * s.N_ave / p.omega_m1).epsilon(1e-14));
  }
  SECTION("X2 vanishes linearly as lambda -> 0") {
    SystemParams p = testing::base_internal();
    std::vector<double> lams = {1e-2, 1e-3, 1e-4, 1e-5};
    double prev_ratio = 0.0;
    for (std::size_t i = 0; i < lams.size(); ++i) {
      p.lambda = lams[i];
      const SteadyState s = testing::figure_steady(p);
      const double ratio = s.X2_bar / lams[i];
      if (i > 0) REQUIRE(ratio == Approx(prev_ratio).epsilon(1e-3));
      prev_ratio = ratio;
    }
  }
}

TEST_CASE("N_ave grows monotonically with G and follows the closed form") {
  SystemParams p = testing::base_internal();
  const double E = *p.E_L;
  double prev = -1.0;
  for (double gk = 0.0; gk < 0.249; gk += 0.01) {
    p.G = gk * p.kappa;
    const double n = testing::figure_steady(p).N_ave;
    REQUIRE(n > prev);
    // N_ave = E^2 (kappa/2 + 2G)^2 / (kappa^2/4 - 4G^2)^2 at theta = 0, Delta' = 0
    const double num = 0.5 * p.kappa + 2.0 * p.G;
    const double den = 0.25 * p.kappa * p.kappa - 4.0 * p.G * p.G;
    REQUIRE(n == Approx(E * E * num * num / (den * den)).epsilon(1e-12));
    prev = n;
  }
}

TEST_CASE("photon_number_curve flags zero drive and failed points") {
  SystemParams p = testing::base_internal();
  const std::vector<double> grid = {0.0, 100.0, 1000.0};
  const auto curve = photon_number_curve(p, grid);
  REQUIRE(curve.size() == 3);
  REQUIRE(curve[0].ok);
  REQUIRE(curve[0].N_ave == 0.0);
  REQUIRE(curve[1].N_ave == Approx(4.0 * 100.0 * 100.0 / (p.kappa * p.kappa)));

  // at the parametric threshold every point fails but the sweep completes
  SystemParams bad = p;
  bad.G = 0.25 * bad.kappa;
  const auto flagged = photon_number_curve(bad, grid);
  REQUIRE(flagged.size() == 3);
  REQUIRE(flagged[0].ok);  // zero drive short-circuits to alpha = 0
  REQUIRE_FALSE(flagged[1].ok);
  REQUIRE_THAT(flagged[1].error, Catch::Matchers::ContainsSubstring("NoConvergence"));
}

TEST_CASE("self-consistent solve agrees with figure mode when Delta_a cancels the spring") {
  SystemParams p = testing::base_internal(0.1, 0.1);
  const SteadyState fig = testing::figure_steady(p);
  p.Delta_a = -p.g0 * fig.X1_bar;  // cancel the static optical spring
  const SteadyState sc = solve_steady_state(p, {.figure_mode = false});
  REQUIRE(sc.Delta_eff == Approx(0.0).margin(1e-10));
  REQUIRE(sc.N_ave == Approx(fig.N_ave).epsilon(1e-9));
}

TEST_CASE("self-consistent solve detects bistability and reports all branches") {
  // strongly driven above the fold of the cubic self-consistency in Delta':
  // the softening spring against positive detuning gives three branches
  SystemParams p = testing::base_internal();
  p.g0 = 5e-3;
  p.E_L = 1.3e5;
  p.Delta_a = 150.0;
  const auto roots = find_steady_states(p);
  REQUIRE(roots.size() == 3);
  for (const auto& s : roots) {
    REQUIRE(steady_residual(p, s, p.Delta_a) < 1e-9);
  }
  try {
    solve_steady_state(p, {.figure_mode = false});
    FAIL("expected Bistability");
  } catch (const Error& e) {
    REQUIRE(e.code() == errc::bistability);
    REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("branches"));
  }
}
