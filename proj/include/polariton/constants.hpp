#pragma once

// Internal unit system: energy in meV, length in nm, time in ps, mass in m0.

namespace polariton::constants {

inline constexpr double pi = 3.14159265358979323846;

/// Reduced Planck constant, meV ps.
inline constexpr double hbar = 0.6582119569;
/// hbar * c, meV nm.
inline constexpr double hbar_c = 197326.9804;
/// Free-electron rest energy m0 c^2, meV.
inline constexpr double m0_c2 = 510998950.0;
/// hbar^2 / (2 m0), meV nm^2.
inline constexpr double hbar2_over_2m0 = hbar_c * hbar_c / (2.0 * m0_c2);
/// Boltzmann constant, meV / K.
inline constexpr double k_boltzmann = 0.08617333262;

// SI values, only used where a closed-form law is written in SI.
inline constexpr double si_hbar = 1.054571817e-34;
inline constexpr double si_elementary_charge = 1.602176634e-19;

/// 1 kg/m^3 expressed in meV ps^2 nm^-5.
inline constexpr double kg_per_m3 = 6.241509074460763;
/// 1 m/s expressed in nm/ps.
inline constexpr double m_per_s = 1.0e-3;
/// 1 um^2 in nm^2.
inline constexpr double um2 = 1.0e6;

}  // namespace polariton::constants
