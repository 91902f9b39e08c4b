#pragma once

namespace sense::constants {

// CODATA 2018 exact values.
inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double k_B = 1.380649e-23;                    // J/K
inline constexpr double h_planck = 6.62607015e-34;             // J.s
inline constexpr double hbar = h_planck / (2.0 * pi);          // J.s

}  // namespace sense::constants
