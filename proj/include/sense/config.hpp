#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "sense/errors.hpp"
#include "sense/params.hpp"

namespace sense {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_number(std::string_view key, std::string_view value) {
  try {
    std::size_t pos = 0;
    const std::string v(value);
    const double x = std::stod(v, &pos);
    while (pos < v.size() && (v[pos] == ' ' || v[pos] == '\t')) ++pos;
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    fail(errc::config_error, "key '" + std::string(key) + "': cannot parse numeric value '" +
                                 std::string(value) + "'");
  }
}

}  // namespace detail

/// Apply one `key = value` assignment (SI units). Unknown keys are an error.
inline void set_param(SystemParams& p, std::string_view key, std::string_view value) {
  const double x = detail::parse_number(key, value);
  if (key == "omega_m1") p.omega_m1 = x;
  else if (key == "omega_m2") p.omega_m2 = x;
  else if (key == "gamma_m1") p.gamma_m1 = x;
  else if (key == "gamma_m2") p.gamma_m2 = x;
  else if (key == "kappa") p.kappa = x;
  else if (key == "kappa_ex") p.kappa_ex = x;
  else if (key == "g0") p.g0 = x;
  else if (key == "Delta_a") p.Delta_a = x;
  else if (key == "E_L") p.E_L = x;
  else if (key == "P_L") p.P_L = x;
  else if (key == "omega_L") p.omega_L = x;
  else if (key == "G") p.G = x;
  else if (key == "theta") p.theta = x;
  else if (key == "lambda") p.lambda = x;
  else if (key == "T") p.T = x;
  else if (key == "Phi") p.Phi = x;
  else fail(errc::config_error, "unknown config key '" + std::string(key) + "'");
}

/// Parse flat `key = value` text (one pair per line, '#' comments).
/// Starts from `base` so presets can be partially overridden.
inline SystemParams parse_config_text(const std::string& text, SystemParams base = {}) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      fail(errc::config_error, "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    set_param(base, detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)));
  }
  return base;
}

inline SystemParams parse_config_file(const std::string& path, SystemParams base = {}) {
  std::ifstream f(path);
  if (!f) fail(errc::io_error, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config_text(buf.str(), base);
}

/// Resolved key-value view of the parameters, for output metadata.
inline std::map<std::string, double> to_key_values(const SystemParams& p) {
  std::map<std::string, double> kv;
  kv["omega_m1"] = p.omega_m1;
  kv["omega_m2"] = p.omega_m2;
  kv["gamma_m1"] = p.gamma_m1;
  kv["gamma_m2"] = p.gamma_m2;
  kv["kappa"] = p.kappa;
  kv["kappa_ex"] = p.kappa_external();
  kv["g0"] = p.g0;
  kv["Delta_a"] = p.Delta_a;
  if (p.E_L) kv["E_L"] = *p.E_L;
  if (p.P_L) kv["P_L"] = *p.P_L;
  if (p.omega_L) kv["omega_L"] = *p.omega_L;
  kv["G"] = p.G;
  kv["theta"] = p.theta;
  kv["lambda"] = p.lambda;
  kv["T"] = p.T;
  kv["Phi"] = p.Phi;
  kv["omega_unit"] = p.omega_unit;
  return kv;
}

}  // namespace sense
