#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "sense/dynamics.hpp"
#include "sense/errors.hpp"
#include "sense/params.hpp"
#include "sense/steady_state.hpp"

namespace sense {

using Cplx = std::complex<double>;

/// Frequency-domain transfer coefficients at one omega.
///
/// chi_a_amp and chi_a_phase are the effective responses of the amplitude and
/// phase quadratures of the cavity; k1..k6 mix quadratures and force inputs;
/// chi_out = sqrt(kappa)/(1 - chi_a_amp k1 chi_a_phase k4) closes the
/// input-output loop and k1p..k4p are the force coefficients of the output
/// quadratures.
struct TransferChain {
  double omega = 0.0;
  Cplx chi_m1, chi_m2;       // bare mechanical susceptibilities
  Cplx chi_m1_eff;           // chi_m1 dressed by the lambda coupling
  Cplx chi_a_amp;            // x_a response
  Cplx chi_a_phase;          // p_a response
  Cplx k1, k2, k3, k4, k5, k6;
  Cplx chi_out;
  Cplx k1p, k2p, k3p, k4p;
};

namespace detail {

inline Cplx mech_susceptibility(double omega, double omega_m, double gamma_m) {
  return omega_m / Cplx(omega_m * omega_m - omega * omega, -omega * gamma_m);
}

}  // namespace detail

/// Recompute the output-side coefficients (chi_out, k1p..k4p) from the core
/// ones. Split out so tests can corrupt a mid-chain coefficient and observe
/// the downstream effect.
inline void finalize_chain(TransferChain& c, double kappa) {
  const double sk = std::sqrt(kappa);
  const Cplx loop = 1.0 - c.chi_a_amp * c.k1 * c.chi_a_phase * c.k4;
  if (std::abs(loop) < 1e-14) {
    fail(errc::pole_hit, "cavity feedback loop 1 - chi'_a k1 p'_a k4 vanishes at omega = " +
                             std::to_string(c.omega));
  }
  c.chi_out = sk / loop;
  c.k1p = c.chi_a_amp * c.k1 * c.chi_a_phase * c.k5 + c.chi_a_amp * c.k2;
  c.k2p = c.chi_a_amp * c.k1 * c.chi_a_phase * c.k6 + c.chi_a_amp * c.k3;
  c.k3p = c.chi_a_amp * c.k2 * c.chi_a_phase * c.k4 + c.chi_a_phase * c.k5;
  c.k4p = c.chi_a_amp * c.k3 * c.chi_a_phase * c.k4 + c.chi_a_phase * c.k6;
}

/// Evaluate the full transfer chain at one frequency.
inline TransferChain transfer_chain(double omega, const SystemParams& p, const SteadyState& ss) {
  TransferChain c;
  c.omega = omega;
  c.chi_m1 = detail::mech_susceptibility(omega, p.omega_m1, p.gamma_m1);
  c.chi_m2 = detail::mech_susceptibility(omega, p.omega_m2, p.gamma_m2);
  const Cplx pair = 1.0 - p.lambda * p.lambda * c.chi_m1 * c.chi_m2;
  if (std::abs(pair) < 1e-14) {
    fail(errc::pole_hit, "coupled-oscillator denominator 1 - lambda^2 chi_m1 chi_m2 vanishes at omega = " +
                             std::to_string(omega));
  }
  c.chi_m1_eff = c.chi_m1 / pair;

  const double g = ss.g_lin;
  const double cphi = std::cos(ss.phi);
  const double sphi = std::sin(ss.phi);
  const double Gc = 2.0 * p.G * std::cos(p.theta);
  const double Gs = 2.0 * p.G * std::sin(p.theta);
  const Cplx shift = g * g * c.chi_m1_eff * sphi * cphi;

  c.chi_a_amp = 1.0 / (Cplx(0.5 * p.kappa - Gc, -omega) + shift);
  c.chi_a_phase = 1.0 / (Cplx(0.5 * p.kappa + Gc, -omega) - shift);
  c.k1 = Gs + ss.Delta_eff - g * g * sphi * sphi * c.chi_m1_eff;
  c.k2 = -c.chi_m1_eff * g * sphi * p.lambda * c.chi_m2 * std::sqrt(2.0 * p.gamma_m2);
  c.k3 = g * sphi * c.chi_m1_eff * std::sqrt(2.0 * p.gamma_m1);
  c.k4 = Gs - ss.Delta_eff + g * g * cphi * cphi * c.chi_m1_eff;
  c.k5 = c.chi_m1_eff * g * cphi * p.lambda * c.chi_m2 * std::sqrt(2.0 * p.gamma_m2);
  c.k6 = -g * cphi * c.chi_m1_eff * std::sqrt(2.0 * p.gamma_m1);

  finalize_chain(c, p.kappa);
  return c;
}

/// Total force-referred noise at one frequency with its decomposition.
struct SpectrumPoint {
  double omega = 0.0;
  double S_total = 0.0;
  double S_th1 = 0.0;   // thermal, oscillator 1
  double S_th2 = 0.0;   // thermal, oscillator 2
  double S_ba = 0.0;    // backaction (x_a^in channel)
  double S_shot = 0.0;  // shot (p_a^in channel)
};

/// Assemble the homodyne noise spectral density from a finished chain. The
/// common denominator is the f_ex signal transfer; f_ex drives both
/// oscillators, so it is the sum of the two thermal-channel coefficients.
inline SpectrumPoint psd_from_chain(const TransferChain& c, const SystemParams& p,
                                    double Phi, ThermalConvention conv = ThermalConvention::high_temperature) {
  const double sk = std::sqrt(p.kappa);
  const double cp = std::cos(Phi);
  const double sp = std::sin(Phi);
  const Cplx inv_out = 1.0 / c.chi_out;

  const Cplx c_th1 = c.k4p * cp - c.k2p * sp;
  const Cplx c_th2 = c.k3p * cp - c.k1p * sp;
  const Cplx n_x = c.chi_a_amp * c.k4 * c.chi_a_phase * sk * cp - (sk * c.chi_a_amp - inv_out) * sp;
  const Cplx n_p = (sk * c.chi_a_phase - inv_out) * cp - c.chi_a_amp * c.k1 * c.chi_a_phase * sk * sp;
  const Cplx dn = c_th1 + c_th2;
  if (std::abs(dn) < 1e-300) {
    fail(errc::degenerate_denominator,
         "homodyne angle nulls the signal transfer at omega = " + std::to_string(c.omega));
  }

  SpectrumPoint s;
  s.omega = c.omega;
  s.S_th1 = std::norm(c_th1 / dn) * thermal_weight(p, p.omega_m1, conv);
  s.S_th2 = std::norm(c_th2 / dn) * thermal_weight(p, p.omega_m2, conv);
  s.S_ba = 0.5 * std::norm(n_x / dn);
  s.S_shot = 0.5 * std::norm(n_p / dn);
  s.S_total = s.S_th1 + s.S_th2 + s.S_ba + s.S_shot;
  return s;
}

/// Closed-form noise spectral density via the transfer chain.
inline SpectrumPoint noise_psd(double omega, const SystemParams& p, const SteadyState& ss,
                               double Phi, ThermalConvention conv = ThermalConvention::high_temperature) {
  return psd_from_chain(transfer_chain(omega, p, ss), p, Phi, conv);
}

/// Independent re-derivation of the same spectral density through the drift
/// matrix: solve m(omega) = (-i omega I - B)^{-1} c(omega) channel by channel,
/// apply input-output and the homodyne rotation, and refer every noise
/// channel to the f_ex signal transfer. Shares no algebra with noise_psd()
/// beyond the drift matrix itself.
inline SpectrumPoint psd_oracle(double omega, const SystemParams& p, const SteadyState& ss,
                                double Phi, ThermalConvention conv = ThermalConvention::high_temperature) {
  using Mat6c = Eigen::Matrix<Cplx, 6, 6>;
  using Vec6c = Eigen::Matrix<Cplx, 6, 1>;
  const DriftModel m = build_drift(p, ss);
  Mat6c A = -m.B.cast<Cplx>();
  for (int i = 0; i < 6; ++i) A(i, i) -= Cplx(0.0, omega);
  Eigen::FullPivLU<Mat6c> lu(A);
  if (!lu.isInvertible()) {
    fail(errc::singular_resolvent, "resolvent -i omega I - B singular at omega = " + std::to_string(omega));
  }

  const double sk = std::sqrt(p.kappa);
  const double cp = std::cos(Phi);
  const double sp = std::sin(Phi);
  // channels: {f_in1, f_in2, x_a^in, p_a^in} -> rows {1, 3, 4, 5}
  const int rows[4] = {1, 3, 4, 5};
  const double amps[4] = {std::sqrt(2.0 * p.gamma_m1), std::sqrt(2.0 * p.gamma_m2), sk, sk};
  Cplx t[4];
  for (int ch = 0; ch < 4; ++ch) {
    Vec6c c = Vec6c::Zero();
    c(rows[ch]) = amps[ch];
    const Vec6c mv = lu.solve(c);
    const Cplx x_out = sk * mv(4) - (ch == 2 ? 1.0 : 0.0);
    const Cplx p_out = sk * mv(5) - (ch == 3 ? 1.0 : 0.0);
    t[ch] = cp * p_out - sp * x_out;
  }
  const Cplx t_sig = t[0] + t[1];  // f_ex enters through both f_in1 and f_in2
  if (std::abs(t_sig) < 1e-300) {
    fail(errc::degenerate_denominator,
         "signal transfer vanishes at omega = " + std::to_string(omega));
  }

  SpectrumPoint s;
  s.omega = omega;
  s.S_th1 = std::norm(t[0] / t_sig) * thermal_weight(p, p.omega_m1, conv);
  s.S_th2 = std::norm(t[1] / t_sig) * thermal_weight(p, p.omega_m2, conv);
  s.S_ba = 0.5 * std::norm(t[2] / t_sig);
  s.S_shot = 0.5 * std::norm(t[3] / t_sig);
  s.S_total = s.S_th1 + s.S_th2 + s.S_ba + s.S_shot;
  return s;
}

struct SweptPoint {
  SpectrumPoint point;
  bool ok = true;
  std::string error;
};

/// Per-point evaluation over a sorted frequency grid; failures are flagged
/// and the sweep continues.
template <typename Eval>
inline std::vector<SweptPoint> sweep_grid(std::span<const double> omega_grid, Eval&& eval) {
  std::vector<SweptPoint> out(omega_grid.size());
  for (std::size_t i = 0; i < omega_grid.size(); ++i) {
    out[i].point.omega = omega_grid[i];
    try {
      out[i].point = eval(omega_grid[i]);
    } catch (const Error& e) {
      out[i].ok = false;
      out[i].error = e.what();
    }
  }
  return out;
}

inline std::vector<SweptPoint> psd_sweep(std::span<const double> omega_grid, const SystemParams& p,
                                         const SteadyState& ss, double Phi,
                                         ThermalConvention conv = ThermalConvention::high_temperature) {
  for (std::size_t i = 1; i < omega_grid.size(); ++i) {
    if (!(omega_grid[i] > omega_grid[i - 1])) {
      fail(errc::config_error, "psd_sweep: omega grid must be sorted ascending");
    }
  }
  return sweep_grid(omega_grid, [&](double w) { return noise_psd(w, p, ss, Phi, conv); });
}

}  // namespace sense
