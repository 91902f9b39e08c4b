#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sense/constants.hpp"
#include "sense/errors.hpp"

namespace sense {

/// Physical parameters of the sensing system.
///
/// Frequencies and rates are stored in units of `omega_unit` rad/s, so raw SI
/// input has omega_unit = 1 and nondimensionalize() rescales to omega_m1 = 1.
/// Temperature is always kelvin; P_L is always watts; angles are radians.
struct SystemParams {
  double omega_m1 = 0.0;      // mechanical frequency, oscillator 1
  double omega_m2 = 0.0;      // mechanical frequency, oscillator 2
  double gamma_m1 = 0.0;      // mechanical damping, oscillator 1
  double gamma_m2 = 0.0;      // mechanical damping, oscillator 2
  double kappa = 0.0;         // total cavity decay rate
  double kappa_ex = -1.0;     // external decay rate; < 0 means "default to kappa"
  double g0 = 0.0;            // single-photon optomechanical coupling
  double Delta_a = 0.0;       // bare cavity-drive detuning omega_a - omega_L
  std::optional<double> E_L;      // drive amplitude
  std::optional<double> P_L;      // drive power (W), alternative to E_L
  std::optional<double> omega_L;  // drive frequency, required with P_L
  double G = 0.0;             // OPA pump gain
  double theta = 0.0;         // OPA pump phase
  double lambda = 0.0;        // oscillator-oscillator coupling
  double T = 0.0;             // bath temperature (K)
  double Phi = 0.0;           // homodyne local-oscillator phase
  double omega_unit = 1.0;    // rad/s per internal frequency unit

  double kappa_external() const { return kappa_ex < 0.0 ? kappa : kappa_ex; }
};

struct ThermalOccupancy {
  double n_th1 = 0.0;
  double n_th2 = 0.0;
};

/// How the thermal force correlators enter the noise spectral density.
/// `high_temperature` uses the coefficient k_B T / (hbar omega_mi) verbatim;
/// `bose_symmetrized` uses n_th + 1/2, which stays correct as T -> 0.
enum class ThermalConvention { high_temperature, bose_symmetrized };

struct Issue {
  errc code;
  std::string message;
};

struct Validation {
  std::vector<Issue> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }

  std::string describe() const {
    std::string out;
    for (const auto& e : errors) {
      if (!out.empty()) out += "; ";
      out += std::string(to_string(e.code)) + ": " + e.message;
    }
    return out;
  }
};

/// Checks the hard invariants and soft regime gates. Hard violations land in
/// `errors`; regime gates (Routh-Hurwitz G < kappa/4, weak coupling,
/// overcoupling) only warn so sweeps may deliberately cross them.
inline Validation validate(const SystemParams& p) {
  Validation v;
  auto positive = [&](double x, const char* name) {
    if (!(x > 0.0)) {
      v.errors.push_back({errc::non_positive_rate,
                          std::string(name) + " must be strictly positive, got " + std::to_string(x)});
    }
  };
  positive(p.omega_m1, "omega_m1");
  positive(p.omega_m2, "omega_m2");
  positive(p.gamma_m1, "gamma_m1");
  positive(p.gamma_m2, "gamma_m2");
  positive(p.kappa, "kappa");
  positive(p.g0, "g0");
  if (p.kappa_ex >= 0.0 && !(p.kappa_ex > 0.0)) {
    v.errors.push_back({errc::non_positive_rate, "kappa_ex must be strictly positive when given"});
  }
  if (p.G < 0.0) v.errors.push_back({errc::non_positive_rate, "G must be nonnegative"});
  if (p.lambda < 0.0) v.errors.push_back({errc::non_positive_rate, "lambda must be nonnegative"});
  if (p.T < 0.0) v.errors.push_back({errc::non_positive_rate, "T must be nonnegative"});
  if (p.E_L && *p.E_L < 0.0) v.errors.push_back({errc::non_positive_rate, "E_L must be nonnegative"});
  if (p.P_L && *p.P_L < 0.0) v.errors.push_back({errc::non_positive_rate, "P_L must be nonnegative"});
  if (p.omega_L && !(*p.omega_L > 0.0)) {
    v.errors.push_back({errc::non_positive_rate, "omega_L must be strictly positive when given"});
  }
  if (!(p.omega_unit > 0.0)) v.errors.push_back({errc::non_positive_rate, "omega_unit must be strictly positive"});

  // static stability of the coupled pair: finite mean displacements need
  // omega_m1 omega_m2 > lambda^2
  if (p.omega_m1 > 0.0 && p.omega_m2 > 0.0 && !(p.omega_m1 * p.omega_m2 > p.lambda * p.lambda)) {
    v.errors.push_back({errc::static_instability,
                        "omega_m1*omega_m2 <= lambda^2: coupled oscillators have no stable rest point"});
  }

  if (p.kappa > 0.0) {
    if (p.G >= 0.25 * p.kappa) {
      v.warnings.push_back("G = " + std::to_string(p.G / p.kappa) +
                           "*kappa exceeds Routh-Hurwitz gate G < 0.25*kappa");
    }
    const double r = p.kappa_external() / p.kappa;
    if (!(r > 0.9 && r <= 1.0 + 1e-12)) {
      v.warnings.push_back("kappa_ex/kappa = " + std::to_string(r) +
                           " outside the overcoupled regime (0.9, 1]");
    }
  }
  if (p.kappa > 0.0 && p.omega_m1 > 0.0) {
    const double gate = 0.1 * std::min(p.kappa, p.omega_m1);
    if (p.g0 > gate) {
      v.warnings.push_back("g0 is not small against kappa and omega_m1; outside the weak-coupling regime");
    }
  }
  return v;
}

/// validate() and throw on the first hard error (message carries all of them).
inline SystemParams validated(const SystemParams& p) {
  Validation v = validate(p);
  if (!v.ok()) throw Error(v.errors.front().code, v.describe());
  return p;
}

/// Drive amplitude in current units. Direct E_L wins; otherwise derived from
/// (P_L, omega_L) via |E_L| = sqrt(kappa P_L / hbar omega_L).
inline double drive_amplitude(const SystemParams& p) {
  if (p.E_L) return *p.E_L;
  if (p.P_L && p.omega_L) {
    // omega_unit cancels inside the square root; the result is a rate and
    // scales like one.
    return std::sqrt(p.kappa * *p.P_L / (constants::hbar * *p.omega_L)) / p.omega_unit;
  }
  fail(errc::config_error, "drive not specified: set E_L or both of (P_L, omega_L)");
}

/// Mean phonon occupation from the exact Bose factor; 0 at T = 0.
inline double bose_occupancy(double omega_si, double temperature) {
  if (temperature <= 0.0) return 0.0;
  const double x = constants::hbar * omega_si / (constants::k_B * temperature);
  return 1.0 / std::expm1(x);
}

inline ThermalOccupancy thermal_occupancy(const SystemParams& p) {
  return {bose_occupancy(p.omega_m1 * p.omega_unit, p.T),
          bose_occupancy(p.omega_m2 * p.omega_unit, p.T)};
}

/// Thermal weight of one oscillator's force correlator in the spectral
/// density, per the chosen convention. omega_mi is in current internal units.
inline double thermal_weight(const SystemParams& p, double omega_mi, ThermalConvention conv) {
  const double omega_si = omega_mi * p.omega_unit;
  switch (conv) {
    case ThermalConvention::high_temperature:
      return p.T > 0.0 ? constants::k_B * p.T / (constants::hbar * omega_si) : 0.0;
    case ThermalConvention::bose_symmetrized:
      return bose_occupancy(omega_si, p.T) + 0.5;
  }
  return 0.0;
}

/// Rescale so that omega_m1 = 1; the physical scale moves into omega_unit.
inline SystemParams nondimensionalize(const SystemParams& p) {
  const double u = p.omega_m1;
  if (!(u > 0.0)) fail(errc::non_positive_rate, "cannot nondimensionalize with omega_m1 <= 0");
  SystemParams q = p;
  q.omega_m1 /= u;
  q.omega_m2 /= u;
  q.gamma_m1 /= u;
  q.gamma_m2 /= u;
  q.kappa /= u;
  if (q.kappa_ex >= 0.0) q.kappa_ex /= u;
  q.g0 /= u;
  q.Delta_a /= u;
  if (q.E_L) *q.E_L /= u;
  if (q.omega_L) *q.omega_L /= u;
  q.G /= u;
  q.lambda /= u;
  q.omega_unit *= u;
  return q;
}

/// Inverse of nondimensionalize(): back to raw rad/s with omega_unit = 1.
inline SystemParams redimensionalize(const SystemParams& p) {
  const double u = p.omega_unit;
  SystemParams q = p;
  q.omega_m1 *= u;
  q.omega_m2 *= u;
  q.gamma_m1 *= u;
  q.gamma_m2 *= u;
  q.kappa *= u;
  if (q.kappa_ex >= 0.0) q.kappa_ex *= u;
  q.g0 *= u;
  q.Delta_a *= u;
  if (q.E_L) *q.E_L *= u;
  if (q.omega_L) *q.omega_L *= u;
  q.G *= u;
  q.lambda *= u;
  q.omega_unit = 1.0;
  return q;
}

}  // namespace sense
