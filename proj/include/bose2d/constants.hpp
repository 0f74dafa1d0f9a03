#pragma once

#include <numbers>

namespace bose2d {

inline constexpr double pi = std::numbers::pi;
inline constexpr double euler_gamma = std::numbers::egamma;

/// Scattering length of the 2D dipolar potential r0/r^3 in units of r0,
/// as quoted with the dipolar DMC energies (a = e^{2γ} r0).
inline constexpr double dipolar_a_over_r0 = 3.17222;

} // namespace bose2d
