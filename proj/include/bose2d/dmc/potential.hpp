#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>

#include "bose2d/errors.hpp"

namespace bose2d::dmc {

/// `ideal` is the non-interacting gas (V = 0, f2 = 1), kept as a reference system.
enum class PotentialKind { dipolar, hard_disk, ideal };

inline std::string_view to_string(PotentialKind k) {
  switch (k) {
  case PotentialKind::dipolar:
    return "dipolar";
  case PotentialKind::hard_disk:
    return "hard_disk";
  case PotentialKind::ideal:
    return "ideal";
  }
  return "?";
}

inline PotentialKind parse_potential_kind(std::string_view s) {
  if (s == "dipolar" || s == "dipoles")
    return PotentialKind::dipolar;
  if (s == "hard_disk" || s == "hard_disks")
    return PotentialKind::hard_disk;
  if (s == "ideal")
    return PotentialKind::ideal;
  throw parse_error("unknown potential '" + std::string(s) + "'");
}

/// Pair interaction in units hbar^2/m = 1. `range` is r0 of V = r0/r^3 for
/// dipoles, the core diameter for hard disks.
struct PotentialModel {
  PotentialKind kind = PotentialKind::dipolar;
  double range = 1.0;

  /// Radius below which the wave function vanishes.
  double core() const noexcept { return kind == PotentialKind::hard_disk ? range : 0.0; }

  double operator()(double r) const noexcept {
    if (kind == PotentialKind::dipolar)
      return range / (r * r * r);
    if (kind == PotentialKind::ideal)
      return 0.0;
    return r <= range ? std::numeric_limits<double>::infinity() : 0.0;
  }

  /// Potential energy per particle from pairs beyond `cutoff` in a uniform gas of
  /// density n: (n/2) ∫_cutoff^∞ V(r) 2 pi r dr.
  double tail_per_particle(double density, double cutoff) const noexcept {
    if (kind != PotentialKind::dipolar)
      return 0.0;
    return std::numbers::pi * density * range / cutoff;
  }
};

/// s-wave scattering length from the zero-energy two-body equation
/// f'' + f'/r = V(r) f (relative motion, hbar^2/m = 1). With z = r f'/f and
/// t = ln r this is the Riccati equation dz/dt = r^2 V - z^2, integrated from
/// deep inside the repulsive core (WKB start) to r = 1e10 range, where
/// z = 1/ln(r/a).
inline double scattering_length_check(const PotentialModel &p) {
  if (!(p.range > 0.0))
    throw domain_error("scattering_length_check: range must be positive");
  if (p.kind == PotentialKind::hard_disk)
    return p.range;
  if (p.kind == PotentialKind::ideal)
    throw domain_error("scattering_length_check: the ideal gas has no scattering length");

  const double r0 = p.range;
  auto rhs = [r0](double t, double z) { return r0 * std::exp(-t) - z * z; };
  double t = std::log(1e-4 * r0);
  const double t_end = std::log(1e10 * r0);
  // WKB: z = sqrt(r0/r) + 1/4 + O(r^{1/2})
  double z = std::sqrt(r0 / std::exp(t)) + 0.25;
  const double h = 2e-4;
  const auto steps = static_cast<long>(std::ceil((t_end - t) / h));
  const double dt = (t_end - t) / static_cast<double>(steps);
  for (long i = 0; i < steps; ++i) {
    const double k1 = rhs(t, z);
    const double k2 = rhs(t + 0.5 * dt, z + 0.5 * dt * k1);
    const double k3 = rhs(t + 0.5 * dt, z + 0.5 * dt * k2);
    const double k4 = rhs(t + dt, z + dt * k3);
    z += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += dt;
    if (!std::isfinite(z))
      throw convergence_error("scattering_length_check: integration diverged");
  }
  if (!(z > 0.0))
    throw convergence_error("scattering_length_check: no logarithmic asymptote reached");
  return std::exp(t - 1.0 / z);
}

} // namespace bose2d::dmc
