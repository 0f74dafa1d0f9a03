#pragma once

// Scalar special functions used by the equation-of-state and Monte Carlo layers:
// the upper incomplete gamma function at order zero, Γ(0,x) = E1(x), and the
// modified Bessel functions K0, K1.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bose2d/constants.hpp"
#include "bose2d/errors.hpp"

namespace bose2d::specfun {

/// Evaluation policy for Γ(0,x). Below the crossover the power series (x <= 1)
/// or the continued fraction is used, above it the asymptotic series.
struct AccuracyPolicy {
  double rel_tol = 1e-12;
  double series_asymptotic_crossover = 30.0;

  void validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-6))
      throw domain_error("AccuracyPolicy: rel_tol must lie in (0, 1e-6]");
    if (!(series_asymptotic_crossover > 0.0))
      throw domain_error("AccuracyPolicy: crossover must be positive");
  }
};

namespace detail {

// Iterations stop two orders of magnitude below the requested tolerance, but
// never below machine precision.
inline double iteration_eps(const AccuracyPolicy &p) {
  return std::max(p.rel_tol * 1e-3, std::numeric_limits<double>::epsilon());
}

inline void require_positive(double x, const char *fn) {
  if (!(x > 0.0) || std::isnan(x))
    throw domain_error(std::string(fn) + ": argument must be positive");
}

// E1(x) for 0 < x <= 1 from -γ - ln x - Σ (-x)^k / (k k!).
inline double e1_series(double x, double eps) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -x / k;
    const double del = term / k;
    sum += del;
    if (std::abs(del) < std::abs(sum) * eps)
      break;
  }
  return -euler_gamma - std::log(x) - sum;
}

// e^x E1(x) for x > 1 by the modified Lentz continued fraction.
inline double e1_scaled_cf(double x, double eps) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < eps)
      return h;
  }
  throw convergence_error("gamma_upper_zero: continued fraction did not converge");
}

// e^x E1(x) from the asymptotic series Σ (-1)^k k!/x^{k+1}, truncated before
// its smallest term. The exact remainder after n terms is
// (-1)^n n! x^{-n} e^x E_{n+1}(x); its leading uniform expansion
// e^x E_p(x) ~ (1 + p/d^2 + p(p-2x)/d^4) / d, d = x + p, is added.
inline double e1_scaled_asymptotic(double x) {
  double sum = 0.0;
  double term = 1.0 / x;
  int k = 0;
  for (;;) {
    sum += term;
    const double next = -term * (k + 1) / x;
    if (std::abs(next) >= std::abs(term) || next == 0.0)
      break;
    term = next;
    ++k;
  }
  // terms 0..k were summed; remainder starts at n = k + 1 and equals
  // next-term-magnitude * x * e^x E_{n+1}(x) with the sign of the next term.
  const int n = k + 1;
  const double next_term = -term * n / x;
  const double p = n + 1.0;
  const double d = x + p;
  const double d2 = d * d;
  const double tail = (1.0 + p / d2 + p * (p - 2.0 * x) / (d2 * d2)) / d;
  return sum + next_term * x * tail;
}

} // namespace detail

/// e^x Γ(0,x), finite for every positive x (no exponentiation of x on the asymptotic path).
inline double gamma_upper_zero_scaled(double x, const AccuracyPolicy &policy = {}) {
  detail::require_positive(x, "gamma_upper_zero_scaled");
  const double eps = detail::iteration_eps(policy);
  if (x <= 1.0)
    return detail::e1_series(x, eps) * std::exp(x);
  if (x < policy.series_asymptotic_crossover)
    return detail::e1_scaled_cf(x, eps);
  return detail::e1_scaled_asymptotic(x);
}

/// Γ(0,x) = ∫_x^∞ e^{-t}/t dt. Throws underflow_error once e^{-x} leaves the
/// normal double range; use gamma_upper_zero_scaled there.
inline double gamma_upper_zero(double x, const AccuracyPolicy &policy = {}) {
  detail::require_positive(x, "gamma_upper_zero");
  if (x > 700.0)
    throw underflow_error("gamma_upper_zero: e^-x underflows, use gamma_upper_zero_scaled");
  if (x <= 1.0)
    return detail::e1_series(x, detail::iteration_eps(policy));
  return gamma_upper_zero_scaled(x, policy) * std::exp(-x);
}

/// Γ(0,x) forced through one branch; exposed for the branch-consistency checks.
enum class GammaBranch { series_or_fraction, asymptotic };

inline double gamma_upper_zero_scaled_branch(double x, GammaBranch branch,
                                             const AccuracyPolicy &policy = {}) {
  detail::require_positive(x, "gamma_upper_zero_scaled_branch");
  if (branch == GammaBranch::asymptotic)
    return detail::e1_scaled_asymptotic(x);
  const double eps = detail::iteration_eps(policy);
  return x <= 1.0 ? detail::e1_series(x, eps) * std::exp(x) : detail::e1_scaled_cf(x, eps);
}

/// K0(x) and K1(x), both multiplied by e^x.
struct BesselK01 {
  double k0;
  double k1;
};

/// Temme's series for x <= 2, Steed's continued fraction above. Returns e^x K0, e^x K1.
inline BesselK01 bessel_k01_scaled(double x) {
  detail::require_positive(x, "bessel_k01");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (x <= 2.0) {
    const double half = 0.5 * x;
    double ff = -euler_gamma - std::log(half);
    double sum = ff;
    double p = 0.5;
    double q = 0.5;
    double c = 1.0;
    const double d = half * half;
    double sum1 = p;
    for (int i = 1; i < 500; ++i) {
      ff = (i * ff + p + q) / (static_cast<double>(i) * i);
      c *= d / i;
      p /= i;
      q /= i;
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::abs(del) < std::abs(sum) * eps)
        break;
    }
    const double scale = std::exp(x);
    return {sum * scale, sum1 * (2.0 / x) * scale};
  }
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i < 10000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < eps) {
      h *= a1;
      const double k0 = std::sqrt(pi / (2.0 * x)) / s;
      const double k1 = k0 * (x + 0.5 - h) / x;
      return {k0, k1};
    }
  }
  throw convergence_error("bessel_k01: continued fraction did not converge");
}

inline BesselK01 bessel_k01(double x) {
  const auto s = bessel_k01_scaled(x);
  const double e = std::exp(-x);
  return {s.k0 * e, s.k1 * e};
}

/// Modified Bessel function of the second kind, order zero.
inline double bessel_k0(double x) { return bessel_k01(x).k0; }

inline double bessel_k1(double x) { return bessel_k01(x).k1; }

} // namespace bose2d::specfun
