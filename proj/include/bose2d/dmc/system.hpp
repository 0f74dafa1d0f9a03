#pragma once

// N bosons in a periodic square box, Jastrow pair-product guiding function
// Psi = prod_{i<j} f2(r_ij) with minimum-image distances, units hbar^2/m = 1.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "bose2d/dmc/guiding.hpp"
#include "bose2d/dmc/potential.hpp"
#include "bose2d/errors.hpp"

namespace bose2d::dmc {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// One ensemble member: coordinates folded into [0, box), plus cached
/// local energy and a lineage id for its random stream.
struct Walker {
  std::vector<double> x;
  std::vector<double> y;
  double e_local = 0.0;
  std::uint64_t lineage = 0;

  std::size_t size() const noexcept { return x.size(); }
};

/// Contribution of one particle's pairs to ln Psi and to its gradient.
struct ParticleTerms {
  double sum_u = 0.0;
  Vec2 grad;
  bool overlap = false;
};

struct LocalEnergy {
  double total = 0.0;     // E_L, whole system, tail included
  double kinetic = 0.0;
  double potential = 0.0; // pair sum inside the cutoff plus tail
  bool overlap = false;   // hard-core overlap: E_L is +inf
};

class System {
public:
  System(const PotentialModel &pot, std::size_t n_particles, double density,
         const GuidingParams &guiding = {})
      : pot_(pot), n_(n_particles), density_(density),
        box_(std::sqrt(static_cast<double>(n_particles) / density)), half_(0.5 * box_),
        jastrow_(pot, box_, guiding) {
    if (n_particles < 2)
      throw domain_error("System: need at least two particles");
    if (!(density > 0.0))
      throw domain_error("System: density must be positive");
  }

  std::size_t n_particles() const noexcept { return n_; }
  double density() const noexcept { return density_; }
  double box() const noexcept { return box_; }
  double cutoff() const noexcept { return half_; }
  const PotentialModel &potential() const noexcept { return pot_; }
  const PairJastrow &jastrow() const noexcept { return jastrow_; }

  /// Potential energy per particle from pairs beyond box/2.
  double tail_per_particle() const noexcept { return pot_.tail_per_particle(density_, half_); }

  double fold(double c) const noexcept {
    c -= box_ * std::floor(c / box_);
    return c >= box_ ? 0.0 : c;
  }

  double min_image(double d) const noexcept {
    if (d > half_)
      return d - box_;
    if (d < -half_)
      return d + box_;
    return d;
  }

  /// Pairs of particle i, placed at (px, py), with every other particle.
  ParticleTerms particle_terms(const Walker &w, std::size_t i, double px, double py) const {
    ParticleTerms t;
    const double cut2 = half_ * half_;
    const double core2 = pot_.core() * pot_.core();
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == i)
        continue;
      const double dx = min_image(px - w.x[j]);
      const double dy = min_image(py - w.y[j]);
      const double r2 = dx * dx + dy * dy;
      if (r2 >= cut2)
        continue;
      if (r2 <= core2) {
        t.overlap = true;
        return t;
      }
      const double r = std::sqrt(r2);
      const auto v = jastrow_(r);
      t.sum_u += v.u;
      const double g = v.du / r;
      t.grad.x += g * dx;
      t.grad.y += g * dy;
    }
    return t;
  }

  /// ln Psi of the full configuration.
  double log_psi(const Walker &w) const {
    double s = 0.0;
    const double cut2 = half_ * half_;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double dx = min_image(w.x[i] - w.x[j]);
        const double dy = min_image(w.y[i] - w.y[j]);
        const double r2 = dx * dx + dy * dy;
        if (r2 >= cut2)
          continue;
        if (jastrow_.inside_core(std::sqrt(r2)))
          return -std::numeric_limits<double>::infinity();
        s += jastrow_(std::sqrt(r2)).u;
      }
    return s;
  }

  /// Gradient of ln Psi with respect to every particle (the DMC drift).
  std::vector<Vec2> drift(const Walker &w) const {
    std::vector<Vec2> g(n_);
    const double cut2 = half_ * half_;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double dx = min_image(w.x[i] - w.x[j]);
        const double dy = min_image(w.y[i] - w.y[j]);
        const double r2 = dx * dx + dy * dy;
        if (r2 >= cut2)
          continue;
        const double r = std::sqrt(r2);
        const double f = jastrow_(r).du / r;
        g[i].x += f * dx;
        g[i].y += f * dy;
        g[j].x -= f * dx;
        g[j].y -= f * dy;
      }
    return g;
  }

  /// E_L = -1/2 sum_i [lap_i ln Psi + (grad_i ln Psi)^2] + sum_{i<j} V(r_ij) + N * tail.
  LocalEnergy local_energy(const Walker &w) const {
    LocalEnergy e;
    thread_local std::vector<double> gx, gy;
    gx.assign(n_, 0.0);
    gy.assign(n_, 0.0);
    double lap = 0.0;
    double pot = 0.0;
    const double cut2 = half_ * half_;
    const double core2 = pot_.core() * pot_.core();
    const bool dipolar = pot_.kind == PotentialKind::dipolar;
    const double r0 = pot_.range;
    for (std::size_t i = 0; i < n_; ++i) {
      const double xi = w.x[i], yi = w.y[i];
      double gxi = 0.0, gyi = 0.0;
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double dx = min_image(xi - w.x[j]);
        const double dy = min_image(yi - w.y[j]);
        const double r2 = dx * dx + dy * dy;
        if (r2 >= cut2)
          continue;
        if (r2 <= core2) {
          e.overlap = true;
          e.total = e.potential = std::numeric_limits<double>::infinity();
          return e;
        }
        const double r = std::sqrt(r2);
        const auto v = jastrow_(r);
        const double f = v.du / r;
        gxi += f * dx;
        gyi += f * dy;
        gx[j] -= f * dx;
        gy[j] -= f * dy;
        // 2D Laplacian of u(r), counted for both partners
        lap += 2.0 * (v.d2u + f);
        if (dipolar)
          pot += r0 / (r2 * r);
      }
      gx[i] += gxi;
      gy[i] += gyi;
    }
    double grad2 = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      grad2 += gx[i] * gx[i] + gy[i] * gy[i];
    e.kinetic = -0.5 * (lap + grad2);
    e.potential = pot + static_cast<double>(n_) * tail_per_particle();
    e.total = e.kinetic + e.potential;
    return e;
  }

  /// Square lattice with the given jitter (fraction of the spacing), folded into the box.
  template <typename Rng> Walker lattice_walker(Rng &rng, double jitter = 0.1) const {
    Walker w;
    w.x.resize(n_);
    w.y.resize(n_);
    const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_))));
    const double a = box_ / static_cast<double>(side);
    for (std::size_t k = 0; k < n_; ++k) {
      const double cx = (static_cast<double>(k % side) + 0.5) * a;
      const double cy = (static_cast<double>(k / side) + 0.5) * a;
      w.x[k] = fold(cx + jitter * a * (rng.uniform() - 0.5));
      w.y[k] = fold(cy + jitter * a * (rng.uniform() - 0.5));
    }
    return w;
  }

  /// True when no pair is closer than the hard-core diameter.
  bool no_overlap(const Walker &w) const {
    const double core2 = pot_.core() * pot_.core();
    if (core2 == 0.0)
      return true;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double dx = min_image(w.x[i] - w.x[j]);
        const double dy = min_image(w.y[i] - w.y[j]);
        if (dx * dx + dy * dy <= core2)
          return false;
      }
    return true;
  }

private:
  PotentialModel pot_;
  std::size_t n_;
  double density_;
  double box_;
  double half_;
  PairJastrow jastrow_;
};

} // namespace bose2d::dmc
