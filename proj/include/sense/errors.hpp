#pragma once

#include <stdexcept>
#include <string>

namespace sense {

enum class errc {
  non_positive_rate,
  static_instability,
  no_convergence,
  bistability,
  eigen_failure,
  unstable_system,
  solver_failure,
  pole_hit,
  degenerate_denominator,
  singular_resolvent,
  soft_mode,
  no_minimum_in_bracket,
  config_error,
  io_error,
};

inline const char* to_string(errc c) {
  switch (c) {
    case errc::non_positive_rate: return "NonPositiveRate";
    case errc::static_instability: return "StaticInstability";
    case errc::no_convergence: return "NoConvergence";
    case errc::bistability: return "Bistability";
    case errc::eigen_failure: return "EigenFailure";
    case errc::unstable_system: return "UnstableSystem";
    case errc::solver_failure: return "SolverFailure";
    case errc::pole_hit: return "PoleHit";
    case errc::degenerate_denominator: return "DegenerateDenominator";
    case errc::singular_resolvent: return "SingularResolvent";
    case errc::soft_mode: return "SoftMode";
    case errc::no_minimum_in_bracket: return "NoMinimumInBracket";
    case errc::config_error: return "ConfigError";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace sense
