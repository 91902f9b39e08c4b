#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "sense/errors.hpp"
#include "sense/params.hpp"
#include "sense/spectrum.hpp"
#include "sense/steady_state.hpp"

namespace sense {

/// Normal modes of two identical oscillators with X1 X2 coupling lambda.
/// Modes are labeled by frequency: the high mode at sqrt(omega_m^2 + lambda
/// omega_m) carries the external-force drive, the low mode at
/// sqrt(omega_m^2 - lambda omega_m) carries only the thermal difference.
struct NormalModes {
  double omega_high = 0.0;
  double omega_low = 0.0;
  double A_high = 0.0, A_low = 0.0;    // A_i = sqrt(wm/wi) + sqrt(wi/wm)
  double Am_high = 0.0, Am_low = 0.0;  // A_i^- = sqrt(wm/wi) - sqrt(wi/wm)
  // Bogoliubov map: (b1, b2, b1+, b2+)^T = map * (c_high, c_low, c_high+, c_low+)^T
  Eigen::Matrix4d map = Eigen::Matrix4d::Zero();
};

namespace detail {

inline void require_identical_oscillators(const SystemParams& p, const char* where) {
  const double tol = 1e-9 * p.omega_m1;
  if (std::abs(p.omega_m1 - p.omega_m2) > tol || std::abs(p.gamma_m1 - p.gamma_m2) > tol) {
    fail(errc::config_error, std::string(where) + " requires identical oscillators "
                                                  "(omega_m1 = omega_m2, gamma_m1 = gamma_m2)");
  }
}

}  // namespace detail

/// Diagonalize the coupled mechanical pair. Requires lambda < omega_m so both
/// squared mode frequencies stay positive.
inline NormalModes diagonalize(const SystemParams& p) {
  detail::require_identical_oscillators(p, "diagonalize");
  const double wm = p.omega_m1;
  const double w2_low = wm * wm - p.lambda * wm;
  if (!(w2_low > 0.0)) {
    fail(errc::soft_mode, "lambda >= omega_m: lower normal mode frequency squared is not positive");
  }
  NormalModes nm;
  nm.omega_high = std::sqrt(wm * wm + p.lambda * wm);
  nm.omega_low = std::sqrt(w2_low);
  auto coeffs = [&](double wi, double& a, double& am) {
    a = std::sqrt(wm / wi) + std::sqrt(wi / wm);
    am = std::sqrt(wm / wi) - std::sqrt(wi / wm);
  };
  coeffs(nm.omega_high, nm.A_high, nm.Am_high);
  coeffs(nm.omega_low, nm.A_low, nm.Am_low);

  const double s = 1.0 / (2.0 * std::sqrt(2.0));
  nm.map << nm.A_high, nm.A_low, nm.Am_high, nm.Am_low,
      nm.A_high, -nm.A_low, nm.Am_high, -nm.Am_low,
      nm.Am_high, nm.Am_low, nm.A_high, nm.A_low,
      nm.Am_high, -nm.Am_low, nm.A_high, -nm.A_low;
  nm.map *= s;
  return nm;
}

/// Effective force-noise coefficients F'_noise = A x_a^in + B p_a^in
/// + C f_th1 + D f_th2 of the normal-mode route.
struct AppendixCoefficients {
  Cplx Aw, Bw, Cw, Dw;
};

/// Normal-mode Langevin coefficients at one frequency.
///
/// Each mode equation carries the canonical per-mode factor
/// s_i = sqrt(omega_m / 2 omega_i) on both its cavity coupling and its force
/// input; this is the unique scaling consistent with the Bogoliubov map and
/// it reduces exactly to the uncoupled sensor at lambda = 0. Valid at the
/// phase-nulled operating point (Delta' = 0, phi = 0, theta = 0).
inline AppendixCoefficients appendix_coefficients(double omega, const SystemParams& p,
                                                  const SteadyState& ss) {
  detail::require_identical_oscillators(p, "appendix_coefficients");
  if (std::abs(ss.Delta_eff) > 1e-9 * p.omega_m1 || std::abs(ss.phi) > 1e-9 ||
      std::abs(p.theta) > 1e-9) {
    fail(errc::config_error,
         "normal-mode route is valid only at the phase-nulled operating point "
         "(Delta_eff = 0, phi = 0, theta = 0)");
  }
  const NormalModes nm = diagonalize(p);
  const double wm = p.omega_m1;
  const double gm = p.gamma_m1;
  const double g = ss.g_lin;

  auto mode_weight = [&](double wi) -> Cplx {
    // s_i^2 chi_i with chi_i = wi / (wi^2 - w^2 - i w gamma)
    const Cplx den(wi * wi - omega * omega, -omega * gm);
    if (std::abs(den) < 1e-14 * wm * wm) {
      fail(errc::pole_hit, "normal-mode susceptibility pole at omega = " + std::to_string(omega));
    }
    return (0.5 * wm) / den;
  };
  const Cplx W1 = mode_weight(nm.omega_high);  // driven by 2 f_ex + f_th1 + f_th2
  const Cplx W2 = mode_weight(nm.omega_low);   // driven by f_th1 - f_th2

  const Cplx chi_ax = 1.0 / Cplx(0.5 * p.kappa - 2.0 * p.G, -omega);
  const double root_2g = std::sqrt(2.0 * gm);
  if (std::abs(W1) < 1e-300 || g == 0.0) {
    fail(errc::degenerate_denominator, "appendix signal transfer vanishes (g or W1 is zero)");
  }

  AppendixCoefficients k;
  k.Aw = -g * std::sqrt(p.kappa) * chi_ax * (W1 + W2) / (2.0 * root_2g * W1);
  k.Bw = -Cplx(0.5 * p.kappa - 2.0 * p.G, omega) /
         (2.0 * std::sqrt(2.0 * gm * p.kappa) * g * W1);
  k.Cw = 0.5 * (W1 + W2) / W1;
  k.Dw = 0.5 * (W1 - W2) / W1;
  return k;
}

/// Noise spectral density assembled from the normal-mode coefficients with
/// the same input correlators as the main-text expression: quantum channels
/// weighted 1/2, thermal channels by the thermal weight of omega_m.
inline SpectrumPoint appendix_psd(double omega, const SystemParams& p, const SteadyState& ss,
                                  ThermalConvention conv = ThermalConvention::high_temperature) {
  const AppendixCoefficients k = appendix_coefficients(omega, p, ss);
  const double wt = thermal_weight(p, p.omega_m1, conv);
  SpectrumPoint s;
  s.omega = omega;
  s.S_ba = 0.5 * std::norm(k.Aw);
  s.S_shot = 0.5 * std::norm(k.Bw);
  s.S_th1 = std::norm(k.Cw) * wt;
  s.S_th2 = std::norm(k.Dw) * wt;
  s.S_total = s.S_th1 + s.S_th2 + s.S_ba + s.S_shot;
  return s;
}

/// Comparison of the main-text and normal-mode spectra over a grid.
struct CrossCheckReport {
  // feature positions: dip at the high mode, thermal peak at the low mode
  double dip_main = 0.0, dip_appendix = 0.0, dip_offset = 0.0;
  double peak_main = 0.0, peak_appendix = 0.0, peak_offset = 0.0;
  double rel_dev_at_dip = 0.0;
  double rel_dev_at_peak = 0.0;
  double max_rel_dev_at_modes = 0.0;
  double pointwise_max_rel_dev = 0.0;
  std::string note;
};

/// Run both derivations on the grid and compare the mode features. Phi = 0 is
/// the appendix's operating quadrature.
inline CrossCheckReport cross_check(std::span<const double> omega_grid, const SystemParams& p,
                                    const SteadyState& ss, double Phi = 0.0,
                                    ThermalConvention conv = ThermalConvention::high_temperature) {
  if (omega_grid.size() < 3) fail(errc::config_error, "cross_check: grid too small");
  const NormalModes nm = diagonalize(p);
  std::vector<double> s_main(omega_grid.size()), s_app(omega_grid.size());
  for (std::size_t i = 0; i < omega_grid.size(); ++i) {
    s_main[i] = noise_psd(omega_grid[i], p, ss, Phi, conv).S_total;
    s_app[i] = appendix_psd(omega_grid[i], p, ss, conv).S_total;
  }

  auto feature = [&](const std::vector<double>& s, double center, double halfwidth, bool minimum) {
    double best = 0.0;
    double best_val = minimum ? std::numeric_limits<double>::infinity() : -1.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (std::abs(omega_grid[i] - center) > halfwidth) continue;
      if (minimum ? (s[i] < best_val) : (s[i] > best_val)) {
        best_val = s[i];
        best = omega_grid[i];
      }
    }
    return std::pair<double, double>{best, best_val};
  };
  // window half-width: half the mode separation, so the two features never
  // claim each other's extremum; floor for the lambda -> 0 degeneracy
  const double hw = std::max(0.03 * p.omega_m1, 0.5 * (nm.omega_high - nm.omega_low));

  CrossCheckReport r;
  auto [dm, dmv] = feature(s_main, nm.omega_high, hw, true);
  auto [da, dav] = feature(s_app, nm.omega_high, hw, true);
  auto [pm, pmv] = feature(s_main, nm.omega_low, hw, false);
  auto [pa, pav] = feature(s_app, nm.omega_low, hw, false);
  r.dip_main = dm;
  r.dip_appendix = da;
  r.dip_offset = std::abs(dm - da);
  r.peak_main = pm;
  r.peak_appendix = pa;
  r.peak_offset = std::abs(pm - pa);
  r.rel_dev_at_dip = std::abs(dmv - dav) / std::max(dmv, 1e-300);
  r.rel_dev_at_peak = std::abs(pmv - pav) / std::max(pmv, 1e-300);
  r.max_rel_dev_at_modes = std::max(r.rel_dev_at_dip, r.rel_dev_at_peak);
  double worst = 0.0;
  for (std::size_t i = 0; i < s_main.size(); ++i) {
    worst = std::max(worst, std::abs(s_main[i] - s_app[i]) / std::max(s_main[i], 1e-300));
  }
  r.pointwise_max_rel_dev = worst;
  r.note =
      "modes labeled by frequency (high = sqrt(wm^2 + lambda wm) carries the drive); "
      "index labels omega_1/omega_2 are ambiguous across conventions and not used";
  return r;
}

}  // namespace sense
