#pragma once

#include <cmath>
#include <concepts>

#include "bose2d/errors.hpp"

namespace bose2d {

struct RootOptions {
  double residual_tol = 1e-12;
  int max_iter = 200;
};

struct RootResult {
  double x;
  double residual;
  int iterations;
};

/// Newton iteration on a bracket [lo, hi] with f(lo), f(hi) of opposite sign.
/// A Newton step leaving the current bracket, or not halving |f|, is replaced by
/// bisection. `fdf(x)` returns {f(x), f'(x)}.
template <typename F>
  requires std::invocable<F, double>
RootResult safeguarded_newton(F &&fdf, double lo, double hi, double x0,
                              const RootOptions &opt = {}) {
  auto [flo, dlo] = fdf(lo);
  auto [fhi, dhi] = fdf(hi);
  (void)dlo;
  (void)dhi;
  if (flo == 0.0)
    return {lo, 0.0, 0};
  if (fhi == 0.0)
    return {hi, 0.0, 0};
  if ((flo > 0.0) == (fhi > 0.0))
    throw no_solution_error("safeguarded_newton: root not bracketed");

  double x = (x0 > lo && x0 < hi) ? x0 : 0.5 * (lo + hi);
  double prev_abs = INFINITY;
  for (int it = 1; it <= opt.max_iter; ++it) {
    auto [f, df] = fdf(x);
    if (std::abs(f) <= opt.residual_tol)
      return {x, f, it};
    if ((f > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = f;
    } else {
      hi = x;
    }
    double next = x - f / df;
    const bool outside = !(next > lo && next < hi) || !std::isfinite(next);
    if (outside || std::abs(f) > 0.5 * prev_abs)
      next = 0.5 * (lo + hi);
    prev_abs = std::abs(f);
    if (next == x)
      return {x, f, it};
    x = next;
  }
  throw convergence_error("safeguarded_newton: iteration cap reached");
}

} // namespace bose2d
