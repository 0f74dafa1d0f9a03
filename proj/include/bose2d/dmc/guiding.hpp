#pragma once

// Pair factor f2(r) = exp(u(r)) of the Jastrow guiding function.
//
// Inner branch (r < match radius R): the exact zero-energy two-body solution,
//   dipoles     f2 = K0(2 sqrt(r0/r))
//   hard disks  f2 = ln(r/a)
// Outer branch (R <= r < box/2): exp(A - c1 g1(r) - c2 g2(r)) with
//   g_k(r) = r^-k + (box - r)^-k,
// symmetric about box/2 so that u'(box/2) = 0. A, c1, c2 match u, u', u''
// at R. u is shifted so that u(box/2) = 0, and f2 = 1 beyond box/2.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "bose2d/dmc/potential.hpp"
#include "bose2d/errors.hpp"
#include "bose2d/specfun.hpp"

namespace bose2d::dmc {

struct GuidingParams {
  /// Joint between the two-body branch and the tail. 0 selects box/4.
  double match_radius = 0.0;
};

/// u = ln f2 and its first two radial derivatives.
struct PairValue {
  double u;
  double du;
  double d2u;
};

class PairJastrow {
public:
  PairJastrow(const PotentialModel &p, double box, const GuidingParams &g = {})
      : pot_(p), box_(box), half_(0.5 * box) {
    if (!(box > 0.0))
      throw domain_error("PairJastrow: box must be positive");
    match_ = g.match_radius > 0.0 ? g.match_radius : 0.25 * box;
    if (!(match_ > p.core() && match_ < half_))
      throw domain_error("PairJastrow: match radius must lie in (core, box/2)");
    if (p.kind == PotentialKind::ideal)
      return;
    fit_tail();
    if (p.kind == PotentialKind::dipolar)
      build_table();
  }

  double box() const noexcept { return box_; }
  double cutoff() const noexcept { return half_; }
  double match_radius() const noexcept { return match_; }
  double tail_c1() const noexcept { return c1_; }
  double tail_c2() const noexcept { return c2_; }
  const PotentialModel &potential() const noexcept { return pot_; }

  bool inside_core(double r) const noexcept { return r <= pot_.core(); }

  /// Analytic evaluation. Inside a hard core u = -inf.
  PairValue exact(double r) const {
    if (r >= half_ || pot_.kind == PotentialKind::ideal)
      return {0.0, 0.0, 0.0};
    if (inside_core(r))
      return {-std::numeric_limits<double>::infinity(), 0.0, 0.0};
    if (r < match_) {
      auto v = inner(r);
      v.u -= shift_;
      return v;
    }
    auto v = outer(r);
    v.u -= shift_;
    return v;
  }

  /// Fast evaluation used by the samplers; identical to exact() up to the
  /// interpolation error of the dipolar table (C2 quintic Hermite, so
  /// derivatives stay consistent with u).
  PairValue operator()(double r) const {
    if (!table_.empty() && r >= table_lo_ && r < match_) {
      const double s = (r - table_lo_) * inv_h_;
      auto k = static_cast<std::size_t>(s);
      if (k >= table_.size())
        k = table_.size() - 1;
      const double t = s - static_cast<double>(k);
      const auto &c = table_[k];
      const double u = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
      const double du =
          c[1] + t * (2 * c[2] + t * (3 * c[3] + t * (4 * c[4] + t * 5 * c[5])));
      const double d2u = 2 * c[2] + t * (6 * c[3] + t * (12 * c[4] + t * 20 * c[5]));
      return {u, du * inv_h_, d2u * inv_h_ * inv_h_};
    }
    return exact(r);
  }

  /// f2(r); zero inside a hard core.
  double pair_guiding(double r) const {
    if (inside_core(r))
      return 0.0;
    return std::exp(exact(r).u);
  }

  /// Unshifted inner and outer branches, exposed for the continuity checks.
  PairValue inner(double r) const {
    if (pot_.kind == PotentialKind::dipolar) {
      const double r0 = pot_.range;
      const double x = 2.0 * std::sqrt(r0 / r);
      const auto k = specfun::bessel_k01_scaled(x);
      const double u = std::log(k.k0) - x;
      const double du = (k.k1 / k.k0) * x / (2.0 * r);
      const double d2u = -du / r + r0 / (r * r * r) - du * du;
      return {u, du, d2u};
    }
    const double l = std::log(r / pot_.range);
    const double du = 1.0 / (r * l);
    return {std::log(l), du, -du / r - du * du};
  }

  PairValue outer(double r) const {
    const double s = box_ - r;
    const double g1 = 1.0 / r + 1.0 / s;
    const double g1p = -1.0 / (r * r) + 1.0 / (s * s);
    const double g1pp = 2.0 / (r * r * r) + 2.0 / (s * s * s);
    const double g2 = 1.0 / (r * r) + 1.0 / (s * s);
    const double g2p = -2.0 / (r * r * r) + 2.0 / (s * s * s);
    const double g2pp = 6.0 / (r * r * r * r) + 6.0 / (s * s * s * s);
    return {amp_ - c1_ * g1 - c2_ * g2, -c1_ * g1p - c2_ * g2p, -c1_ * g1pp - c2_ * g2pp};
  }

  double shift() const noexcept { return shift_; }

private:
  void fit_tail() {
    const double R = match_;
    const double s = box_ - R;
    const auto in = inner(R);
    const double g1p = -1.0 / (R * R) + 1.0 / (s * s);
    const double g1pp = 2.0 / (R * R * R) + 2.0 / (s * s * s);
    const double g2p = -2.0 / (R * R * R) + 2.0 / (s * s * s);
    const double g2pp = 6.0 / (R * R * R * R) + 6.0 / (s * s * s * s);
    // -c1 g1' - c2 g2' = u', -c1 g1'' - c2 g2'' = u''
    const double det = g1p * g2pp - g2p * g1pp;
    if (!(std::abs(det) > 0.0))
      throw domain_error("PairJastrow: singular tail matching");
    c1_ = (-in.du * g2pp + g2p * in.d2u) / det;
    c2_ = (-g1p * in.d2u + in.du * g1pp) / det;
    amp_ = 0.0;
    const auto o = outer(R);
    amp_ = in.u - o.u;
    shift_ = outer(half_).u;
  }

  void build_table() {
    const double r0 = pot_.range;
    table_lo_ = 0.05 * r0;
    if (!(table_lo_ < match_))
      return;
    const double span = match_ - table_lo_;
    auto intervals = static_cast<std::size_t>(std::ceil(span / (1e-3 * r0)));
    intervals = std::clamp<std::size_t>(intervals, 256, std::size_t{1} << 18);
    const double h = span / static_cast<double>(intervals);
    inv_h_ = 1.0 / h;
    table_.resize(intervals);
    PairValue a = inner(table_lo_);
    for (std::size_t k = 0; k < intervals; ++k) {
      const PairValue b = inner(table_lo_ + static_cast<double>(k + 1) * h);
      const double p0 = a.u - shift_, p1 = b.u - shift_;
      const double m0 = h * a.du, m1 = h * b.du;
      const double a0 = h * h * a.d2u, a1 = h * h * b.d2u;
      table_[k] = {p0,
                   m0,
                   0.5 * a0,
                   -10 * p0 - 6 * m0 - 1.5 * a0 + 0.5 * a1 - 4 * m1 + 10 * p1,
                   15 * p0 + 8 * m0 + 1.5 * a0 - a1 + 7 * m1 - 15 * p1,
                   -6 * p0 - 3 * m0 - 0.5 * a0 + 0.5 * a1 - 3 * m1 + 6 * p1};
      a = b;
    }
  }

  PotentialModel pot_;
  double box_;
  double half_;
  double match_ = 0.0;
  double c1_ = 0.0;
  double c2_ = 0.0;
  double amp_ = 0.0;
  double shift_ = 0.0;
  double table_lo_ = 0.0;
  double inv_h_ = 0.0;
  std::vector<std::array<double, 6>> table_;
};

} // namespace bose2d::dmc
