#pragma once

// Physical constants in SI units.  h, c and k_B are exact by definition
// since the 2019 SI redefinition; hbar is quoted to 12 significant digits.
namespace fsq::constants {

inline constexpr double planck = 6.62607015e-34;        // J s
inline constexpr double speed_of_light = 2.99792458e8;  // m / s
inline constexpr double boltzmann = 1.380649e-23;       // J / K
inline constexpr double hbar = 1.05457181765e-34;       // J s

}  // namespace fsq::constants
