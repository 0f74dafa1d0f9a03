#pragma once

// Analytic equations of state of the dilute two-dimensional Bose gas.
//
// Everything here works with dimensionless quantities of the gas parameter
// na^2, held in log form:
//   L   = |ln na^2|
//   eps = (E/N) m / (2 pi hbar^2 n)    energy per particle
//   mu~ = mu m / (4 pi hbar^2 n)       chemical potential
// so the mean-field (Schick) result reads eps = mu~ = 1/L.

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bose2d/constants.hpp"
#include "bose2d/errors.hpp"
#include "bose2d/roots.hpp"
#include "bose2d/specfun.hpp"

namespace bose2d::eos {

/// The gas parameter na^2 stored as its natural logarithm.
class GasParameter {
public:
  /// `log_na2` must be negative (dilute side).
  static GasParameter from_log(double log_na2) {
    if (!(log_na2 < 0.0) || !std::isfinite(log_na2))
      throw domain_error("GasParameter: ln(na^2) must be negative and finite");
    return GasParameter(log_na2);
  }
  static GasParameter from_L(double L) { return from_log(-L); }

  double log_na2() const noexcept { return log_na2_; }
  double L() const noexcept { return -log_na2_; }
  double ln_L() const { return std::log(L()); }
  double log10_na2() const noexcept { return log_na2_ / std::numbers::ln10; }

private:
  explicit GasParameter(double v) : log_na2_(v) {}
  double log_na2_;
};

/// na^2 for the dipolar gas at density n r0^2, using a = 3.17222 r0.
inline GasParameter from_density_dipoles(double n_r02) {
  if (!(n_r02 > 0.0))
    throw domain_error("from_density_dipoles: density must be positive");
  const double log_na2 = std::log(n_r02) + 2.0 * std::log(dipolar_a_over_r0);
  if (!(log_na2 < 0.0))
    throw regime_error("from_density_dipoles: na^2 >= 1, not a dilute gas");
  return GasParameter::from_log(log_na2);
}

// ---------------------------------------------------------------------------
// Mean field

inline double energy_mf_schick(const GasParameter &g) { return 1.0 / g.L(); }

/// Energy obtained by integrating the Schick chemical potential over density:
/// eps = 2 e^{2L} Γ(0, 2L).
inline double energy_mf_integrated(const GasParameter &g) {
  const double L = g.L();
  if (!(L > 0.5))
    throw regime_error("energy_mf_integrated: requires L > 1/2");
  return 2.0 * specfun::gamma_upper_zero_scaled(2.0 * L);
}

/// Large-L expansion of energy_mf_integrated, eps = 1/(L + 1/2 - 1/(4L)).
inline double energy_mf_expansion(const GasParameter &g) {
  const double L = g.L();
  if (!(L > 1.0))
    throw regime_error("energy_mf_expansion: requires L > 1");
  return 1.0 / (L + 0.5 - 0.25 / L);
}

// ---------------------------------------------------------------------------
// Literature theory lines: eps = 1/(L + D(L))

enum class Theory {
  schick,
  popov,
  lozovik,
  hines,
  fisher,
  kolomeisky,
  ovchinnikov,
  cherny_mora_pricoupenko,
  andersen,
  pilati_fit,
};

struct TheorySpec {
  Theory id;
  std::string_view name;
  std::string_view reference; // first author(s) and year
  // validity window in ln L; nullopt means unbounded on that side
  std::optional<double> ln_L_min;
  std::optional<double> ln_L_max;

  bool bounded() const noexcept { return ln_L_min.has_value() || ln_L_max.has_value(); }
};

inline constexpr std::array<TheorySpec, 10> theories{{
    {Theory::schick, "schick", "Schick 1971; Lieb 2001", std::nullopt, std::nullopt},
    {Theory::popov, "popov", "Popov 1971", std::nullopt, std::nullopt},
    {Theory::lozovik, "lozovik", "Lozovik 1978", std::nullopt, std::nullopt},
    {Theory::hines, "hines", "Hines 1978", std::nullopt, std::nullopt},
    {Theory::fisher, "fisher", "Fisher 1988", std::nullopt, std::nullopt},
    {Theory::kolomeisky, "kolomeisky", "Kolomeisky 1992", std::nullopt, std::nullopt},
    {Theory::ovchinnikov, "ovchinnikov", "Ovchinnikov 1993", std::nullopt, std::nullopt},
    {Theory::cherny_mora_pricoupenko, "cherny_mora_pricoupenko",
     "Cherny 2001; Mora 2003; Pricoupenko 2004", std::nullopt, std::nullopt},
    {Theory::andersen, "andersen", "Andersen 2002", std::nullopt, std::nullopt},
    {Theory::pilati_fit, "pilati_fit", "Pilati 2005 (hard-disk DMC fit)", 1.5, 2.8},
}};

inline const TheorySpec &theory_spec(Theory t) {
  for (const auto &s : theories)
    if (s.id == t)
      return s;
  throw domain_error("theory_spec: unknown theory");
}

inline std::optional<Theory> theory_by_name(std::string_view name) {
  for (const auto &s : theories)
    if (s.name == name)
      return s.id;
  return std::nullopt;
}

/// Denominator correction D(L) of one literature line.
inline double theory_correction(const TheorySpec &t, const GasParameter &g) {
  const double L = g.L();
  const double lnL = std::log(L);
  const double ln4pi = std::log(4.0 * pi);
  const double lnpi = std::log(pi);
  if (t.bounded()) {
    const double lo = t.ln_L_min.value_or(-INFINITY);
    const double hi = t.ln_L_max.value_or(INFINITY);
    if (!(lnL > lo && lnL < hi))
      throw validity_error(std::string(t.name) + ": ln L outside validity window", lo, hi);
  }
  switch (t.id) {
  case Theory::schick:
    return 0.0;
  case Theory::popov:
  case Theory::fisher:
  case Theory::andersen:
    return lnL - ln4pi - 0.5;
  case Theory::lozovik:
    return lnL - ln4pi + 0.5;
  case Theory::hines:
    if (!(L + lnpi > 1.0))
      throw validity_error("hines: requires L + ln(pi) > 1", std::log(1.0 - lnpi), INFINITY);
    return std::log(L + lnpi) - std::log(2.0 * pi * pi * pi) - 2.0 * euler_gamma + 1.5;
  case Theory::kolomeisky:
    if (!(L > ln4pi))
      throw validity_error("kolomeisky: requires L > ln(4 pi)", std::log(ln4pi), INFINITY);
    return std::log(L - ln4pi) - ln4pi;
  case Theory::ovchinnikov:
    return lnL;
  case Theory::cherny_mora_pricoupenko:
    return lnL - lnpi - 2.0 * euler_gamma - 0.5;
  case Theory::pilati_fit:
    return 0.86 * lnL - 2.26;
  }
  throw domain_error("theory_correction: unknown theory");
}

inline double theory_energy(const TheorySpec &t, const GasParameter &g) {
  return 1.0 / (g.L() + theory_correction(t, g));
}

/// Ordinate of the beyond-mean-field plot, 1/eps - L (abscissa is ln L).
inline double fig1_ordinate(double eps, const GasParameter &g) {
  if (!(eps > 0.0))
    throw domain_error("fig1_ordinate: energy must be positive");
  return 1.0 / eps - g.L();
}

// ---------------------------------------------------------------------------
// Cherny-Shanenko in-medium amplitude

/// Right-hand side of 1/u + ln u = -ln(pi na^2) - 2γ.
inline double cherny_rhs(const GasParameter &g) {
  return g.L() - std::log(pi) - 2.0 * euler_gamma;
}

/// Root u in (0, 1] of 1/u + ln u = L - ln(pi) - 2γ.
inline double cherny_u(const GasParameter &g) {
  const double rhs = cherny_rhs(g);
  if (rhs < 1.0 - 1e-12)
    throw no_solution_error("cherny_u: 1/u + ln u >= 1, density too high for the expansion");
  if (rhs <= 1.0)
    return 1.0;
  auto fdf = [rhs](double u) {
    return std::pair{1.0 / u + std::log(u) - rhs, (u - 1.0) / (u * u)};
  };
  // f(1/(2R)) = R - ln 2R > 0 and f(min(1, 1/R)) <= 0 for R >= 1
  const double lo = 0.5 / rhs;
  const double hi = std::min(1.0, 1.0 / rhs);
  const double guess = 1.0 / (rhs + std::log(rhs));
  const auto r = safeguarded_newton(fdf, lo, hi, guess);
  if (!(std::abs(r.residual) <= 1e-12))
    throw convergence_error("cherny_u: residual above 1e-12");
  return r.x;
}

/// eps = u + u^2/2 - c3 u^3. The original series has c3 = 1.
inline double cherny_energy(double u, double c3) {
  if (!(u >= 0.0 && u <= 1.0))
    throw domain_error("cherny_energy: u must lie in [0, 1]");
  return u + 0.5 * u * u - c3 * u * u * u;
}

// ---------------------------------------------------------------------------
// Popov

/// Self-consistent root of mu~ (L + ln C1 - ln 4pi - 1 - ln mu~) = 1.
inline double popov_solve(const GasParameter &g, double c1_popov) {
  if (!(c1_popov > 0.0))
    throw domain_error("popov_solve: C1 must be positive");
  const double b = g.L() + std::log(c1_popov) - std::log(4.0 * pi) - 1.0;
  if (!(b > 1.0))
    throw regime_error("popov_solve: L + ln C1 - ln 4pi - 1 must exceed 1");
  double y = 1.0 / b;
  for (int it = 0; it < 200; ++it) {
    const double mapped = 1.0 / (b - std::log(y));
    // slope of the map at y; damping 1/(1 - slope) gives a Newton-like step
    const double slope = mapped * mapped / y;
    const double damping = slope < 0.9 ? 1.0 / (1.0 - slope) : 0.5;
    y += damping * (mapped - y);
    if (!(y > 0.0))
      throw convergence_error("popov_solve: iterate left the positive axis");
    if (std::abs(y * (b - std::log(y)) - 1.0) <= 1e-12)
      return y;
  }
  throw convergence_error("popov_solve: no convergence in 200 iterations");
}

/// Iterated closed form mu~ = 1/(L + ln L - ln 4pi + ln C1 - 1).
inline double popov_closed_form(const GasParameter &g, double c1_popov) {
  if (!(c1_popov > 0.0))
    throw domain_error("popov_closed_form: C1 must be positive");
  const double L = g.L();
  const double den = L + std::log(L) - std::log(4.0 * pi) + std::log(c1_popov) - 1.0;
  if (!(den > 0.0))
    throw regime_error("popov_closed_form: nonpositive denominator");
  return 1.0 / den;
}

// ---------------------------------------------------------------------------
// Universal equation of state

struct UniversalConstants {
  double c1_mu = -std::log(pi) - 2.0 * euler_gamma - 1.0;
  double c2_mu = -0.3;
  double c2_mu_err = 0.1;

  double c1_e() const noexcept { return c1_mu + 0.5; }
  double c2_e() const noexcept { return c2_mu + 0.25; }

  /// Same constants with c2_mu shifted by `sigmas` times its uncertainty.
  UniversalConstants shifted(double sigmas) const {
    auto k = *this;
    k.c2_mu += sigmas * c2_mu_err;
    return k;
  }
};

/// Number of terms kept in the universal denominator beyond L.
enum class SeriesOrder {
  mean_field = 0,  // L
  first_bmf = 1,   // + ln L
  second_bmf = 2,  // + c1
  third_bmf = 3,   // + (ln L + c2)/L
};

namespace detail {
inline void require_universal_regime(double L, const char *fn) {
  if (!(L > std::numbers::e))
    throw regime_error(std::string(fn) + ": requires L > e");
}

inline double universal_denominator(double L, double c1, double c2, SeriesOrder order) {
  const double lnL = std::log(L);
  double d = L;
  if (order >= SeriesOrder::first_bmf)
    d += lnL;
  if (order >= SeriesOrder::second_bmf)
    d += c1;
  if (order >= SeriesOrder::third_bmf)
    d += (lnL + c2) / L;
  return d;
}
} // namespace detail

inline double universal_mu(const GasParameter &g, const UniversalConstants &k = {},
                           SeriesOrder order = SeriesOrder::third_bmf) {
  detail::require_universal_regime(g.L(), "universal_mu");
  return 1.0 / detail::universal_denominator(g.L(), k.c1_mu, k.c2_mu, order);
}

inline double universal_energy(const GasParameter &g, const UniversalConstants &k = {},
                               SeriesOrder order = SeriesOrder::third_bmf) {
  detail::require_universal_regime(g.L(), "universal_energy");
  return 1.0 / detail::universal_denominator(g.L(), k.c1_e(), k.c2_e(), order);
}

/// L at which the beyond-mean-field terms of the universal chemical potential cancel.
inline double universal_mu_cancellation_L(const UniversalConstants &k = {}) {
  auto fdf = [&k](double L) {
    const double lnL = std::log(L);
    return std::pair{lnL + k.c1_mu + (lnL + k.c2_mu) / L,
                     1.0 / L + (1.0 - lnL - k.c2_mu) / (L * L)};
  };
  return safeguarded_newton(fdf, 3.0, 200.0, 24.0).x;
}

/// Beyond-mean-field part of the universal energy denominator,
/// ln L + c1_e + (ln L + c2_e)/L. Zero where the BMF terms cancel.
inline double universal_energy_correction(double L, const UniversalConstants &k = {}) {
  const double lnL = std::log(L);
  return lnL + k.c1_e() + (lnL + k.c2_e()) / L;
}

/// L at which the beyond-mean-field terms of the universal energy cancel.
inline double universal_cancellation_L(const UniversalConstants &k = {}) {
  auto fdf = [&k](double L) {
    const double lnL = std::log(L);
    const double f = universal_energy_correction(L, k);
    const double df = 1.0 / L + (1.0 - lnL - k.c2_e()) / (L * L);
    return std::pair{f, df};
  };
  return safeguarded_newton(fdf, 3.0, 100.0, 13.0).x;
}

/// log10 of the density na^2 ≈ exp(-(4pi)^m) at which ln L exceeds ln 4pi by a factor m.
inline double characteristic_density(double m) {
  if (!(m > 0.0))
    throw domain_error("characteristic_density: m must be positive");
  return -std::pow(4.0 * pi, m) / std::numbers::ln10;
}

} // namespace bose2d::eos
