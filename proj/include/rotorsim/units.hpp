#pragma once

#include <numbers>

// Unit convention used throughout the code.
//
// Energies are measured in hbar^2 / (2 I) and times in 4 pi I / hbar, where I
// is the moment of inertia of one rotor.  Two consequences are used in many
// places and are worth writing down once:
//
//   * a stationary level of scaled energy e accumulates the phase
//     E t / hbar = e * (hbar^2 / 2I) * tau * (4 pi I / hbar) / hbar
//                = 2 pi e tau
//     per scaled time tau, so phase factors are exp(-i 2 pi e tau);
//
//   * the guidance velocity (hbar / I) Im[ (d Psi / dq) / Psi ] turns into
//     dQ/dtau = 4 pi Im[ (d Psi / dq) / Psi ].
//
// A free level with angular momentum quantum number j therefore advances by
// 4 pi j per unit of scaled time, twice around the circle for j = 1.

namespace rotorsim {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// phase accumulated per unit time and unit scaled energy
inline constexpr double phase_rate = two_pi;

// prefactor of Im[grad Psi / Psi] in the guidance law
inline constexpr double velocity_prefactor = 2.0 * two_pi;

}  // namespace rotorsim
