#pragma once

// Local density approximation for N bosons in an isotropic 2D harmonic trap,
// units hbar = m = 1 (so a_ho = omega^{-1/2}), and the breathing-mode
// frequency from the compressional sum rule
//   Omega^2 = -2 <r^2> / (d<r^2>/d omega^2)   at fixed N.
//
// With nu = mu0 - omega^2 r^2 / 2 the normalization and the second moment
// reduce to one-dimensional integrals over the local chemical potential,
//   N         = (2 pi / omega^2) ∫_0^mu0 n(nu) dnu
//   N <r^2>   = (4 pi / omega^4) ∫_0^mu0 n(nu) (mu0 - nu) dnu
// where n(nu) inverts the bulk mu(n).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "bose2d/constants.hpp"
#include "bose2d/eos.hpp"
#include "bose2d/errors.hpp"
#include "bose2d/roots.hpp"

namespace bose2d::trap {

enum class EosChoice { mf_linear, mf_schick, universal };

inline std::string_view to_string(EosChoice e) {
  switch (e) {
  case EosChoice::mf_linear:
    return "mf_linear";
  case EosChoice::mf_schick:
    return "mf_schick";
  case EosChoice::universal:
    return "universal";
  }
  return "?";
}

inline EosChoice parse_eos_choice(std::string_view s) {
  if (s == "mf_linear")
    return EosChoice::mf_linear;
  if (s == "mf_schick")
    return EosChoice::mf_schick;
  if (s == "universal")
    return EosChoice::universal;
  throw parse_error("unknown eos '" + std::string(s) + "' (expected mf_linear, mf_schick or universal)");
}

struct TrapConfig {
  double n_particles = 1e4;
  double omega = 1.0;
  EosChoice eos = EosChoice::universal;
  double scattering_length = 1e-3;
  /// g of mu = g n, used by mf_linear only.
  double coupling = 1.0;
  eos::UniversalConstants constants{};

  double oscillator_length() const { return 1.0 / std::sqrt(omega); }

  void validate() const {
    if (!(n_particles > 0.0))
      throw domain_error("TrapConfig: n_particles must be positive");
    if (!(omega > 0.0))
      throw domain_error("TrapConfig: omega must be positive");
    if (!(scattering_length > 0.0))
      throw domain_error("TrapConfig: scattering_length must be positive");
    if (eos == EosChoice::mf_linear && !(coupling > 0.0))
      throw domain_error("TrapConfig: coupling must be positive");
  }
};

/// sqrt(N) r0^2 / a_ho^2 with r0 = a / 3.17222.
inline double lda_parameter(const TrapConfig &t) {
  const double r0 = t.scattering_length / dipolar_a_over_r0;
  return std::sqrt(t.n_particles) * r0 * r0 * t.omega;
}

/// Scattering length that gives the requested LDA parameter at fixed N and omega.
inline double scattering_length_for(double lda_param, double n_particles, double omega) {
  if (!(lda_param > 0.0) || !(n_particles > 0.0) || !(omega > 0.0))
    throw domain_error("scattering_length_for: arguments must be positive");
  return dipolar_a_over_r0 * std::sqrt(lda_param / (std::sqrt(n_particles) * omega));
}

/// Quasi-2D scattering length under tight transverse confinement,
/// prefactor * a_ho_z * exp(-sqrt(pi/2) a_ho_z / a_3d).
inline double effective_scattering_length(double a_3d, double a_ho_z, double prefactor = 1.0) {
  if (!(a_3d > 0.0) || !(a_ho_z > 0.0) || !(prefactor > 0.0))
    throw domain_error("effective_scattering_length: arguments must be positive");
  return prefactor * a_ho_z * std::exp(-std::sqrt(pi / 2.0) * a_ho_z / a_3d);
}

/// Bulk chemical potential mu(n) for one EOS choice, inverted on demand.
class LocalEos {
public:
  explicit LocalEos(const TrapConfig &t)
      : kind_(t.eos), g_(t.coupling), log_a2_(2.0 * std::log(t.scattering_length)), k_(t.constants) {}

  /// mu at density n.
  double mu(double n) const {
    const auto [lm, d] = log_mu(std::log(n) + log_a2_);
    (void)d;
    return std::exp(lm);
  }

  /// Largest mu the EOS can represent (infinite unless the universal regime ends).
  double mu_max() const {
    if (kind_ != EosChoice::universal)
      return std::numeric_limits<double>::infinity();
    return std::exp(log_mu(-std::numbers::e).first);
  }

  /// Density at local chemical potential nu >= 0.
  double density(double nu) const {
    if (!(nu > 0.0))
      return 0.0;
    const double target = std::log(nu);
    if (!(target > -700.0))
      return 0.0;
    if (kind_ == EosChoice::mf_linear)
      return nu / g_;
    auto f = [&](double x) {
      const auto [lm, d] = log_mu(x);
      return std::pair{lm - target, d};
    };
    const double x_hi = kind_ == EosChoice::universal ? -std::numbers::e : -1e-12;
    if (f(x_hi).first < 0.0)
      throw regime_error(std::string(to_string(kind_)) +
                         ": local chemical potential beyond the validity of the equation of state");
    double x_lo = std::min(target - std::log(4.0 * pi) + log_a2_, x_hi - 1.0);
    while (f(x_lo).first > 0.0)
      x_lo -= 10.0;
    RootOptions opt;
    opt.residual_tol = 1e-13;
    const auto r = safeguarded_newton(f, x_lo, x_hi, 0.5 * (x_lo + x_hi), opt);
    return std::exp(r.x - log_a2_);
  }

private:
  /// ln mu and d ln mu / dx as functions of x = ln(n a^2).
  std::pair<double, double> log_mu(double x) const {
    const double ln_n = x - log_a2_;
    if (kind_ == EosChoice::mf_linear)
      return {std::log(g_) + ln_n, 1.0};
    const double L = -x;
    if (kind_ == EosChoice::mf_schick)
      return {std::log(4.0 * pi) + ln_n - std::log(L), 1.0 + 1.0 / L};
    const double lnL = std::log(L);
    const double D = L + lnL + k_.c1_mu + (lnL + k_.c2_mu) / L;
    const double dD = 1.0 + 1.0 / L + (1.0 - lnL - k_.c2_mu) / (L * L);
    if (!(D > 0.0))
      throw regime_error("universal: nonpositive denominator");
    return {std::log(4.0 * pi) + ln_n - std::log(D), 1.0 + dD / D};
  }

  EosChoice kind_;
  double g_;
  double log_a2_;
  eos::UniversalConstants k_;
};

struct LdaProfile {
  double mu0 = 0.0;
  double omega = 0.0;
  double n_particles = 0.0;
  double edge_radius = 0.0;
  std::vector<double> radius;
  std::vector<double> density;
  /// ∫ n dnu and ∫ n (mu0 - nu) dnu over [0, mu0].
  double moment0 = 0.0;
  double moment1 = 0.0;
};

namespace detail {

struct Moments {
  double m0;
  double m1;
};

inline Moments moments(const LocalEos &eos, double mu0) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  const double tol = 1e-14;
  const double m0 = integrator.integrate([&](double nu) { return eos.density(nu); }, 0.0, mu0, tol);
  const double m1 = integrator.integrate(
      [&](double nu, double complement) {
        // complement = mu0 - nu, exact near the upper end
        const double rest = nu > 0.5 * mu0 ? complement : mu0 - nu;
        return eos.density(nu) * rest;
      },
      0.0, mu0, tol);
  return {m0, m1};
}

} // namespace detail

/// Number of grid points in the tabulated profile.
inline constexpr std::size_t lda_grid_points = 401;

/// Solves the LDA profile for the configured N and omega. mu0 is found by a
/// bracketed Newton iteration on ln N(mu0); dN/dmu0 = 2 pi n(mu0) / omega^2.
inline LdaProfile lda_profile(const TrapConfig &t) {
  t.validate();
  const LocalEos eos(t);
  const double w2 = t.omega * t.omega;
  const double target = std::log(t.n_particles);
  auto count = [&](double mu0) { return 2.0 * pi / w2 * detail::moments(eos, mu0).m0; };
  auto f = [&](double y) {
    const double mu0 = std::exp(y);
    const double n = count(mu0);
    return std::pair{std::log(n) - target, 2.0 * pi / w2 * eos.density(mu0) * mu0 / n};
  };

  // Bracket in y = ln mu0. N(mu0) is increasing.
  double y_lo = std::log(t.omega);
  double y_hi = y_lo;
  const double y_cap = std::log(eos.mu_max());
  while (f(y_lo).first > 0.0)
    y_lo -= 2.0;
  y_hi = std::max(y_lo + 2.0, y_hi);
  for (;;) {
    if (y_hi >= y_cap) {
      y_hi = y_cap;
      if (f(y_hi).first < 0.0)
        throw regime_error("lda_profile: the trap centre would lie beyond the validity of the equation of state");
      break;
    }
    if (f(y_hi).first >= 0.0)
      break;
    y_lo = y_hi;
    y_hi += 2.0;
  }
  RootOptions opt;
  opt.residual_tol = 1e-14;
  RootResult root{};
  try {
    root = safeguarded_newton(f, y_lo, y_hi, 0.5 * (y_lo + y_hi), opt);
  } catch (const convergence_error &) {
    throw convergence_error("lda_profile: normalization did not converge");
  }

  LdaProfile p;
  p.mu0 = std::exp(root.x);
  p.omega = t.omega;
  p.n_particles = t.n_particles;
  p.edge_radius = std::sqrt(2.0 * p.mu0) / t.omega;
  const auto m = detail::moments(eos, p.mu0);
  p.moment0 = m.m0;
  p.moment1 = m.m1;
  // Grid r_k = R sin(pi k / 2K), dense toward the edge where n -> 0.
  p.radius.resize(lda_grid_points);
  p.density.resize(lda_grid_points);
  for (std::size_t k = 0; k < lda_grid_points; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(lda_grid_points - 1);
    const double r = k + 1 == lda_grid_points ? p.edge_radius : p.edge_radius * std::sin(0.5 * pi * s);
    p.radius[k] = r;
    p.density[k] = k + 1 == lda_grid_points ? 0.0 : eos.density(p.mu0 - 0.5 * w2 * r * r);
  }
  return p;
}

/// <r^2> of a solved profile, from its chemical-potential moments.
inline double mean_square_radius(const LdaProfile &p) {
  return 2.0 * p.moment1 / (p.omega * p.omega * p.moment0);
}

/// <r^2> of a tabulated radial density, trapezoidal rule on the given grid.
inline double mean_square_radius(std::span<const double> r, std::span<const double> n) {
  if (r.size() != n.size() || r.size() < 2)
    throw domain_error("mean_square_radius: need matching grids with at least two points");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 1; k < r.size(); ++k) {
    const double h = r[k] - r[k - 1];
    if (!(h > 0.0))
      throw domain_error("mean_square_radius: radii must increase");
    const double a0 = n[k - 1] * r[k - 1], a1 = n[k] * r[k];
    den += 0.5 * h * (a0 + a1);
    num += 0.5 * h * (a0 * r[k - 1] * r[k - 1] + a1 * r[k] * r[k]);
  }
  if (!(den > 0.0))
    throw domain_error("mean_square_radius: empty profile");
  return num / den;
}

/// Particle number of a tabulated radial density, 2 pi ∫ n r dr by the trapezoidal rule.
inline double particle_number(std::span<const double> r, std::span<const double> n) {
  double s = 0.0;
  for (std::size_t k = 1; k < r.size(); ++k)
    s += 0.5 * (r[k] - r[k - 1]) * (n[k - 1] * r[k - 1] + n[k] * r[k]);
  return 2.0 * pi * s;
}

/// <r^2> of the non-interacting ground state, a_ho^2 = 1/omega.
inline double ideal_mean_square_radius(double omega) {
  if (!(omega > 0.0))
    throw domain_error("ideal_mean_square_radius: omega must be positive");
  return 1.0 / omega;
}

/// Sum-rule ratio Omega^2/omega^2 for any <r^2>(omega^2). The derivative is a
/// central difference with relative step h, Richardson-combined with step 2h;
/// the two differences must agree within `consistency`.
inline double sum_rule_ratio(const std::function<double(double)> &r2_of_w2, double w2,
                             double rel_step = 1e-4, double consistency = 1e-3) {
  if (!(rel_step > 0.0 && rel_step < 0.1))
    throw domain_error("sum_rule_ratio: relative step must lie in (0, 0.1)");
  const double h = rel_step * w2;
  const double d1 = (r2_of_w2(w2 + h) - r2_of_w2(w2 - h)) / (2.0 * h);
  const double d2 = (r2_of_w2(w2 + 2.0 * h) - r2_of_w2(w2 - 2.0 * h)) / (4.0 * h);
  if (!(std::abs(d1 - d2) <= consistency * std::abs(d1)))
    throw convergence_error("sum_rule_ratio: derivative inconsistent between step sizes");
  const double d = (4.0 * d1 - d2) / 3.0;
  return -2.0 * r2_of_w2(w2) / (d * w2);
}

/// Omega^2 / omega^2 of the lowest breathing mode within LDA.
inline double breathing_frequency(const TrapConfig &t, double rel_step = 1e-4) {
  t.validate();
  auto r2 = [&t](double w2) {
    TrapConfig c = t;
    c.omega = std::sqrt(w2);
    return mean_square_radius(lda_profile(c));
  };
  return sum_rule_ratio(r2, t.omega * t.omega, rel_step);
}

} // namespace bose2d::trap
