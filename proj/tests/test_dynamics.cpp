#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "sense/dynamics.hpp"
#include "test_helpers.hpp"

using namespace sense;
using Catch::Approx;

namespace {

SteadyState forced_steady(double g_lin, double delta_eff = 0.0, double phi = 0.0) {
  SteadyState s;
  s.g_lin = g_lin;
  s.Delta_eff = delta_eff;
  s.phi = phi;
  return s;
}

}  // namespace

TEST_CASE("drift matrix decouples when g_lin = 0 and G = 0") {
  SystemParams p = testing::base_internal(0.2, 0.0);
  const DriftModel m = build_drift(p, forced_steady(0.0));
  // mechanical block and cavity block share no entries
  for (int i = 0; i < 4; ++i) {
    for (int j = 4; j < 6; ++j) {
      REQUIRE(m.B(i, j) == 0.0);
      REQUIRE(m.B(j, i) == 0.0);
    }
  }
  REQUIRE(m.B(4, 4) == Approx(-0.5 * p.kappa));
  REQUIRE(m.B(5, 5) == Approx(-0.5 * p.kappa));
  REQUIRE(m.B(1, 2) == Approx(-p.lambda));
  REQUIRE(m.B(3, 0) == Approx(-p.lambda));
}

TEST_CASE("drift matrix rows at theta = 0, Delta' = 0, phi = 0") {
  SystemParams p = testing::base_internal(0.15, 0.2);
  const SteadyState ss = testing::figure_steady(p);
  const DriftModel m = build_drift(p, ss);
  const double g = ss.g_lin;
  // row of dx_a: [0,0,0,0, 2G - kappa/2, 0]
  REQUIRE(m.B(4, 0) == 0.0);
  REQUIRE(m.B(4, 4) == Approx(2.0 * p.G - 0.5 * p.kappa));
  REQUIRE(m.B(4, 5) == 0.0);
  // row of dp_a: [-g,0,0,0, 0, -2G - kappa/2]
  REQUIRE(m.B(5, 0) == Approx(-g));
  REQUIRE(m.B(5, 4) == 0.0);
  REQUIRE(m.B(5, 5) == Approx(-2.0 * p.G - 0.5 * p.kappa));
  // radiation pressure back onto the oscillator
  REQUIRE(m.B(1, 4) == Approx(-g));
  REQUIRE(m.B(1, 5) == 0.0);
}

TEST_CASE("diffusion matrix carries kappa/2 for both cavity quadratures at any T") {
  for (double T : {0.0, 0.077, 300.0}) {
    SystemParams p = testing::base_internal(0.0, 0.0, T);
    const DriftModel m = build_drift(p, forced_steady(0.0));
    REQUIRE(m.D(4, 4) == Approx(0.5 * p.kappa));
    REQUIRE(m.D(5, 5) == Approx(0.5 * p.kappa));
    REQUIRE(m.D(0, 0) == 0.0);
    REQUIRE(m.D(2, 2) == 0.0);
    // mechanical rows: 2 gamma (n_th + 1/2)
    const ThermalOccupancy n = thermal_occupancy(p);
    REQUIRE(m.D(1, 1) == Approx(2.0 * p.gamma_m1 * (n.n_th1 + 0.5)));
    REQUIRE(m.D(3, 3) == Approx(2.0 * p.gamma_m2 * (n.n_th2 + 0.5)));
  }
}

TEST_CASE("instability of the anti-damped cavity block is detected") {
  SystemParams p = testing::base_internal(0.0, 0.3);
  const DriftModel m = build_drift(p, forced_steady(0.0));
  const StabilityReport st = is_stable(m);
  REQUIRE_FALSE(st.stable);
  // the decoupled block has the eigenvalue 2G - kappa/2 = 0.1 kappa
  REQUIRE(st.max_real_eigenvalue == Approx(0.1 * p.kappa).epsilon(1e-10));
}

TEST_CASE("fig9 working point G = 0.24 kappa is stable") {
  SystemParams p = testing::base_internal(0.15, 0.24);
  const SteadyState ss = testing::figure_steady(p);
  REQUIRE(is_stable(build_drift(p, ss)).stable);
}

TEST_CASE("eigenvalues of the real drift matrix come in conjugate pairs") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ul(0.0, 0.3), ug(0.0, 0.24), ut(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    SystemParams p = testing::base_internal(ul(rng), ug(rng));
    p.theta = ut(rng);
    const DriftModel m = build_drift(p, testing::figure_steady(p));
    Eigen::EigenSolver<Mat6> es(m.B);
    REQUIRE(es.info() == Eigen::Success);
    for (int i = 0; i < 6; ++i) {
      const auto e = es.eigenvalues()(i);
      bool found = false;
      for (int j = 0; j < 6; ++j) {
        if (std::abs(es.eigenvalues()(j) - std::conj(e)) < 1e-8 * (1.0 + std::abs(e))) {
          found = true;
          break;
        }
      }
      REQUIRE(found);
    }
  }
}

TEST_CASE("stability boundary sits at G = kappa/4 for small coupling") {
  SystemParams p = testing::base_internal();
  SECTION("decoupled: exact") {
    const double gb = stability_boundary_in_G(p, forced_steady(0.0), 0.0, 0.3 * p.kappa);
    REQUIRE(gb / p.kappa == Approx(0.25).margin(1e-9));
  }
  SECTION("g_lin << kappa: within 1e-3 kappa") {
    const double gb = stability_boundary_in_G(p, forced_steady(1e-3 * p.kappa), 0.0, 0.3 * p.kappa);
    REQUIRE(gb / p.kappa == Approx(0.25).margin(1e-3));
  }
  SECTION("sweep flips within (0.249, 0.251) kappa") {
    const SteadyState ss = forced_steady(1e-4);
    auto stable_at = [&](double gk) {
      SystemParams q = p;
      q.G = gk * q.kappa;
      return is_stable(build_drift(q, ss)).stable;
    };
    REQUIRE(stable_at(0.249));
    REQUIRE_FALSE(stable_at(0.251));
  }
}

TEST_CASE("Lyapunov solver reproduces closed-form variances") {
  SECTION("vacuum cavity: var = 1/2 on both quadratures") {
    SystemParams p = testing::base_internal(0.0, 0.0, 0.0);
    const CovarianceResult cv = steady_covariance(build_drift(p, forced_steady(0.0)));
    REQUIRE(cv.var_xa == Approx(0.5).epsilon(1e-12));
    REQUIRE(cv.var_pa == Approx(0.5).epsilon(1e-12));
  }
  SECTION("G = 0.2 kappa, T = 0, decoupled: var_pa = 5/18, var_xa = 5/2") {
    SystemParams p = testing::base_internal(0.0, 0.2, 0.0);
    const CovarianceResult cv = steady_covariance(build_drift(p, forced_steady(0.0)));
    REQUIRE(cv.var_pa == Approx(5.0 / 18.0).margin(1e-10));
    REQUIRE(cv.var_xa == Approx(2.5).margin(1e-9));
    REQUIRE(cv.var_pa < 0.5);
  }
}

TEST_CASE("Lyapunov residual stays below 1e-10 whenever stable") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> ul(0.0, 0.3), ug(0.0, 0.24), ut(-3.0, 3.0),
      utemp(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    SystemParams p = testing::base_internal(ul(rng), ug(rng), utemp(rng));
    p.theta = ut(rng);
    const DriftModel m = build_drift(p, testing::figure_steady(p));
    if (!is_stable(m).stable) continue;
    const CovarianceResult cv = steady_covariance(m);
    REQUIRE(cv.residual < 1e-10);
    // V is symmetric PSD up to tolerance
    Eigen::SelfAdjointEigenSolver<Mat6> es(cv.V);
    REQUIRE(es.eigenvalues().minCoeff() > -1e-10 * cv.V.norm());
  }
}

TEST_CASE("steady_covariance refuses an unstable drift") {
  SystemParams p = testing::base_internal(0.0, 0.3);
  REQUIRE_THROWS_AS(steady_covariance(build_drift(p, forced_steady(0.0))), Error);
}

TEST_CASE("coupling to the auxiliary oscillator does not enhance phase squeezing") {
  SystemParams p = testing::base_internal(0.0, 0.2, 0.0);
  const SteadyState ss = testing::figure_steady(p);
  const double base = steady_covariance(build_drift(p, ss)).var_pa;
  for (double lam : {0.05, 0.10, 0.15, 0.20}) {
    SystemParams q = p;
    q.lambda = lam;
    const double v = steady_covariance(build_drift(q, ss)).var_pa;
    REQUIRE(v >= base - 1e-6);
  }
}
