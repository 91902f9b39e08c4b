#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>

#include "sense/errors.hpp"
#include "sense/params.hpp"
#include "sense/steady_state.hpp"

namespace sense {

using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Linearized fluctuation dynamics dm/dt = B m + c over the state
/// [dX1, dP1, dX2, dP2, dx_a, dp_a].
struct DriftModel {
  Mat6 B = Mat6::Zero();
  Mat6 D = Mat6::Zero();  // symmetrized diffusion of the input vector c(t)
};

/// Build the drift and diffusion matrices from a converged steady state.
///
/// The mechanical bath entries use the symmetrized correlator 2*gamma*(n_th + 1/2);
/// at the operating points of interest (n_th ~ 1e3) this is within 0.1% of the
/// high-temperature shortcut and it stays correct at T -> 0, where the cavity
/// squeezing lives.
inline DriftModel build_drift(const SystemParams& p, const SteadyState& ss) {
  const double g = ss.g_lin;
  const double cphi = std::cos(ss.phi);
  const double sphi = std::sin(ss.phi);
  const double l1 = 2.0 * p.G * std::cos(p.theta) - 0.5 * p.kappa;
  const double l1p = -2.0 * p.G * std::cos(p.theta) - 0.5 * p.kappa;
  const double l2 = 2.0 * p.G * std::sin(p.theta) + ss.Delta_eff;
  const double l2p = 2.0 * p.G * std::sin(p.theta) - ss.Delta_eff;

  DriftModel m;
  m.B << 0.0, p.omega_m1, 0.0, 0.0, 0.0, 0.0,
      -p.omega_m1, -p.gamma_m1, -p.lambda, 0.0, -g * cphi, -g * sphi,
      0.0, 0.0, 0.0, p.omega_m2, 0.0, 0.0,
      -p.lambda, 0.0, -p.omega_m2, -p.gamma_m2, 0.0, 0.0,
      g * sphi, 0.0, 0.0, 0.0, l1, l2,
      -g * cphi, 0.0, 0.0, 0.0, l2p, l1p;

  const ThermalOccupancy nth = thermal_occupancy(p);
  m.D.diagonal() << 0.0, 2.0 * p.gamma_m1 * (nth.n_th1 + 0.5),
      0.0, 2.0 * p.gamma_m2 * (nth.n_th2 + 0.5),
      0.5 * p.kappa, 0.5 * p.kappa;
  return m;
}

struct StabilityReport {
  bool stable = false;
  double max_real_eigenvalue = 0.0;
  double margin = 0.0;  // -max real part
};

inline StabilityReport is_stable(const DriftModel& m) {
  Eigen::EigenSolver<Mat6> es(m.B, false);
  if (es.info() != Eigen::Success) fail(errc::eigen_failure, "eigensolver did not converge on B");
  double max_re = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 6; ++i) max_re = std::max(max_re, es.eigenvalues()(i).real());
  return {max_re < 0.0, max_re, -max_re};
}

/// Solve B X + X B^T + Q = 0 by Bartels-Stewart on the complex Schur form.
/// Valid whenever no two eigenvalues of B sum to zero (guaranteed strictly
/// stable B).
inline Mat6 lyapunov_solve(const Mat6& B, const Mat6& Q) {
  using Cplx = std::complex<double>;
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(B.cast<Cplx>(), true);
  if (schur.info() != Eigen::Success) fail(errc::solver_failure, "Schur decomposition of B failed");
  const Eigen::MatrixXcd U = schur.matrixU();
  const Eigen::MatrixXcd T = schur.matrixT();
  // With W = U^H X conj(U):  T W + W T^T = -U^H Q conj(U).
  const Eigen::MatrixXcd Qt = U.adjoint() * Q.cast<Cplx>() * U.conjugate();
  const int n = 6;
  Eigen::MatrixXcd W(n, n);
  for (int i = n - 1; i >= 0; --i) {
    for (int j = n - 1; j >= 0; --j) {
      Cplx s = Qt(i, j);
      for (int k = i + 1; k < n; ++k) s += T(i, k) * W(k, j);
      for (int k = j + 1; k < n; ++k) s += W(i, k) * T(j, k);
      const Cplx denom = T(i, i) + T(j, j);
      if (std::abs(denom) < 1e-300) {
        fail(errc::unstable_system, "eigenvalue pair sums to zero; Lyapunov solution undefined");
      }
      W(i, j) = -s / denom;
    }
  }
  const Mat6 X = (U * W * U.transpose()).real();
  return 0.5 * (X + X.transpose());
}

struct CovarianceResult {
  Mat6 V = Mat6::Zero();
  double var_pa = 0.0;  // <dp_a^2>
  double var_xa = 0.0;  // <dx_a^2>
  double residual = 0.0;  // ||B V + V B^T + D|| / ||D||
};

/// Steady-state symmetrized covariance from the continuous Lyapunov equation
/// B V + V B^T + D = 0. Requires a strictly stable drift.
inline CovarianceResult steady_covariance(const DriftModel& m) {
  const StabilityReport st = is_stable(m);
  if (!st.stable) {
    fail(errc::unstable_system,
         "drift matrix is not strictly stable (max Re eigenvalue = " +
             std::to_string(st.max_real_eigenvalue) + ")");
  }
  CovarianceResult r;
  r.V = lyapunov_solve(m.B, m.D);
  r.var_xa = r.V(4, 4);
  r.var_pa = r.V(5, 5);
  r.residual = (m.B * r.V + r.V * m.B.transpose() + m.D).norm() / m.D.norm();
  return r;
}

/// Locate the instability onset in G by bisection on the sign of the largest
/// real eigenvalue, holding everything else in (p, ss) fixed.
inline double stability_boundary_in_G(const SystemParams& p, const SteadyState& ss,
                                      double G_lo, double G_hi, int iterations = 60) {
  auto max_re = [&](double G) {
    SystemParams q = p;
    q.G = G;
    return is_stable(build_drift(q, ss)).max_real_eigenvalue;
  };
  double lo = G_lo, hi = G_hi;
  double f_lo = max_re(lo), f_hi = max_re(hi);
  if ((f_lo < 0.0) == (f_hi < 0.0)) {
    fail(errc::no_minimum_in_bracket, "stability does not change sign on the given G bracket");
  }
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((max_re(mid) < 0.0) == (f_lo < 0.0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace sense
