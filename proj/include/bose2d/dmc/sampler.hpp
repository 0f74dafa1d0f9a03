#pragma once

// Variational and diffusion Monte Carlo drivers.
//
// Both samplers move one particle at a time. VMC uses uniform proposals in a
// square of side `step` and samples |Psi|^2. DMC uses the importance-sampled
// short-time propagator: drift tau * grad ln Psi plus Gaussian diffusion of
// variance tau per coordinate, followed by a Metropolis test that makes the
// move exact for |Psi|^2 in the tau -> 0 limit. Branching uses the effective
// timestep tau * acceptance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bose2d/dmc/config.hpp"
#include "bose2d/dmc/potential.hpp"
#include "bose2d/dmc/rng.hpp"
#include "bose2d/dmc/system.hpp"
#include "bose2d/errors.hpp"
#include "bose2d/stats.hpp"

namespace bose2d::dmc {

enum class EstimateTag { vmc, dmc_mixed, extrapolated };

inline std::string_view to_string(EstimateTag t) {
  switch (t) {
  case EstimateTag::vmc:
    return "vmc";
  case EstimateTag::dmc_mixed:
    return "dmc_mixed";
  case EstimateTag::extrapolated:
    return "extrapolated";
  }
  return "?";
}

/// Energy per particle, units hbar^2/(m range^2).
struct EnergyEstimate {
  double mean = 0.0;
  double err = 0.0;
  EstimateTag tag = EstimateTag::vmc;
};

struct VmcResult {
  EnergyEstimate energy;
  double acceptance = 0.0;
  double step = 0.0;
  bool tuning_warning = false; // acceptance outside [0.2, 0.9]
  std::vector<double> trace;   // E_L / N per sweep during measurement
};

struct DmcResult {
  EnergyEstimate energy;
  double acceptance = 0.0;
  double mean_population = 0.0;
  bool timestep_warning = false;
  std::vector<double> trace; // mixed estimate / N per step during measurement
  std::vector<Walker> walkers;
};

namespace detail {

inline constexpr std::uint64_t vmc_lineage = 0x766d63ULL;

class VmcChain {
public:
  VmcChain(const System &sys, std::uint64_t seed, double step)
      : sys_(sys), seed_(seed), step_(step) {
    Stream rng(seed, vmc_lineage, 0);
    w_ = sys.lattice_walker(rng, 0.1);
    if (!sys.no_overlap(w_))
      throw simulation_error("vmc: initial lattice overlaps the hard core; density too high");
  }

  /// One sweep of N single-particle moves. Returns accepted moves.
  std::size_t sweep() {
    Stream rng(seed_, vmc_lineage, ++sweeps_);
    std::size_t acc = 0;
    const auto n = sys_.n_particles();
    for (std::size_t i = 0; i < n; ++i) {
      const double nx = sys_.fold(w_.x[i] + step_ * (rng.uniform() - 0.5));
      const double ny = sys_.fold(w_.y[i] + step_ * (rng.uniform() - 0.5));
      const double xi = rng.uniform();
      const auto fresh = sys_.particle_terms(w_, i, nx, ny);
      if (fresh.overlap)
        continue;
      const auto old = sys_.particle_terms(w_, i, w_.x[i], w_.y[i]);
      const double ln_ratio = 2.0 * (fresh.sum_u - old.sum_u);
      if (ln_ratio >= 0.0 || xi < std::exp(ln_ratio)) {
        w_.x[i] = nx;
        w_.y[i] = ny;
        ++acc;
      }
    }
    return acc;
  }

  const Walker &walker() const noexcept { return w_; }
  double step() const noexcept { return step_; }
  void set_step(double s) noexcept { step_ = s; }

private:
  const System &sys_;
  std::uint64_t seed_;
  double step_;
  std::uint64_t sweeps_ = 0;
  Walker w_;
};

inline double default_vmc_step(const DmcConfig &c) {
  return c.vmc_step > 0.0 ? c.vmc_step : 0.25 / std::sqrt(c.density);
}

/// Step rescaled toward acceptance 0.5, bounded by the box.
inline double retune(double step, double acceptance, double box) {
  const double f = std::clamp(acceptance / 0.5, 0.5, 2.0);
  return std::min(step * f, box);
}

inline EnergyEstimate blocked(std::span<const double> trace, EstimateTag tag) {
  const auto b = stats::blocking(trace);
  return {b.mean, b.err, tag};
}

/// Runs fn(begin, end) over [0, n) split into `workers` contiguous chunks.
inline void parallel_for(std::size_t n, std::size_t workers,
                         const std::function<void(std::size_t, std::size_t)> &fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) {
      const std::size_t b = std::min(n, t * chunk), e = std::min(n, (t + 1) * chunk);
      pool.emplace_back([&fn, &errors, t, b, e] {
        try {
          fn(b, e);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    try {
      fn(0, std::min(n, chunk));
    } catch (...) {
      errors[0] = std::current_exception();
    }
  }
  for (const auto &e : errors)
    if (e)
      std::rethrow_exception(e);
}

} // namespace detail

/// Metropolis sampling of |Psi|^2 with a single chain. The step is tuned
/// toward acceptance 0.5 during equilibration and frozen afterwards; one
/// local-energy sample is taken per sweep.
inline VmcResult vmc_simulate(const DmcConfig &c, const PotentialModel &p) {
  c.validate();
  const System sys(p, c.n_particles, c.density, c.guiding);
  detail::VmcChain chain(sys, c.seed, detail::default_vmc_step(c));
  const auto n = static_cast<double>(c.n_particles);

  for (std::size_t b = 0; b < c.equil_blocks; ++b) {
    std::size_t acc = 0;
    for (std::size_t s = 0; s < c.steps_per_block; ++s)
      acc += chain.sweep();
    const double ratio = static_cast<double>(acc) / (n * static_cast<double>(c.steps_per_block));
    chain.set_step(detail::retune(chain.step(), ratio, sys.box()));
  }

  VmcResult res;
  res.trace.reserve(c.measure_blocks * c.steps_per_block);
  std::size_t acc = 0;
  for (std::size_t b = 0; b < c.measure_blocks; ++b)
    for (std::size_t s = 0; s < c.steps_per_block; ++s) {
      acc += chain.sweep();
      res.trace.push_back(sys.local_energy(chain.walker()).total / n);
    }
  res.acceptance = static_cast<double>(acc) / (n * static_cast<double>(res.trace.size()));
  res.step = chain.step();
  res.tuning_warning = res.acceptance < 0.2 || res.acceptance > 0.9;
  res.energy = detail::blocked(res.trace, EstimateTag::vmc);
  return res;
}

inline EnergyEstimate vmc_run(const DmcConfig &c, const PotentialModel &p) {
  return vmc_simulate(c, p).energy;
}

/// Initial DMC ensemble: an equilibrated VMC chain sampled every second sweep.
inline std::vector<Walker> initial_walkers(const DmcConfig &c, const PotentialModel &p) {
  const System sys(p, c.n_particles, c.density, c.guiding);
  detail::VmcChain chain(sys, c.seed, detail::default_vmc_step(c));
  const auto n = static_cast<double>(c.n_particles);
  const std::size_t tune_every = 20;
  std::size_t acc = 0;
  for (std::size_t s = 1; s <= c.init_sweeps; ++s) {
    acc += chain.sweep();
    if (s % tune_every == 0) {
      chain.set_step(detail::retune(chain.step(), static_cast<double>(acc) / (n * tune_every), sys.box()));
      acc = 0;
    }
  }
  std::vector<Walker> out;
  out.reserve(c.target_walkers);
  for (std::size_t k = 0; k < c.target_walkers; ++k) {
    chain.sweep();
    chain.sweep();
    Walker w = chain.walker();
    w.lineage = hash_combine(c.seed, k + 1);
    out.push_back(std::move(w));
  }
  return out;
}

/// Importance-sampled DMC. `start` overrides the VMC-generated ensemble (restart).
inline DmcResult dmc_simulate(const DmcConfig &c, const PotentialModel &p,
                              const std::vector<Walker> *start = nullptr) {
  c.validate();
  const System sys(p, c.n_particles, c.density, c.guiding);
  const auto n = static_cast<double>(c.n_particles);
  const double tau = c.timestep;
  const double sqrt_tau = std::sqrt(tau);
  const double target = static_cast<double>(c.target_walkers);
  const double kappa = 0.1;

  std::vector<Walker> walkers = start ? *start : initial_walkers(c, p);
  if (walkers.empty())
    throw simulation_error("dmc: empty initial ensemble");
  for (auto &w : walkers) {
    if (w.size() != c.n_particles)
      throw simulation_error("dmc: walker particle count does not match the configuration");
    for (std::size_t i = 0; i < w.size(); ++i) {
      w.x[i] = sys.fold(w.x[i]);
      w.y[i] = sys.fold(w.y[i]);
    }
    const auto e = sys.local_energy(w);
    if (e.overlap)
      throw simulation_error("dmc: initial walker violates the hard core");
    w.e_local = e.total;
  }

  double e_est = 0.0;
  for (const auto &w : walkers)
    e_est += w.e_local;
  e_est /= static_cast<double>(walkers.size());
  double e_trial = e_est;

  std::vector<double> e_new;
  std::vector<double> weight;
  std::vector<std::size_t> accepted;
  std::vector<std::size_t> copies;
  std::size_t total_accepted = 0, total_proposed = 0;

  DmcResult res;
  const std::size_t blocks = c.equil_blocks + c.measure_blocks;
  res.trace.reserve(c.measure_blocks * c.steps_per_block);
  double population_sum = 0.0;
  std::uint64_t step = 0;

  for (std::size_t b = 0; b < blocks; ++b) {
    const bool measuring = b >= c.equil_blocks;
    double block_sum = 0.0;
    for (std::size_t s = 0; s < c.steps_per_block; ++s) {
      ++step;
      const std::size_t m = walkers.size();
      e_new.assign(m, 0.0);
      weight.assign(m, 0.0);
      accepted.assign(m, 0);
      copies.assign(m, 0);
      const double acc_ratio =
          total_proposed ? static_cast<double>(total_accepted) / static_cast<double>(total_proposed) : 1.0;
      const double tau_eff = tau * acc_ratio;

      detail::parallel_for(m, c.workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
          Walker &w = walkers[k];
          Stream rng(c.seed, w.lineage, step);
          std::size_t acc = 0;
          for (std::size_t i = 0; i < c.n_particles; ++i) {
            const auto old = sys.particle_terms(w, i, w.x[i], w.y[i]);
            const double ex = sqrt_tau * rng.normal(), ey = sqrt_tau * rng.normal();
            const double dx = tau * old.grad.x + ex, dy = tau * old.grad.y + ey;
            const double xi = rng.uniform();
            const double nx = sys.fold(w.x[i] + dx), ny = sys.fold(w.y[i] + dy);
            const auto fresh = sys.particle_terms(w, i, nx, ny);
            if (fresh.overlap)
              continue;
            const double bx = dx + tau * fresh.grad.x, by = dy + tau * fresh.grad.y;
            const double ln_ratio = 2.0 * (fresh.sum_u - old.sum_u) -
                                    (bx * bx + by * by - ex * ex - ey * ey) / (2.0 * tau);
            if (ln_ratio >= 0.0 || xi < std::exp(ln_ratio)) {
              w.x[i] = nx;
              w.y[i] = ny;
              ++acc;
            }
          }
          const auto e = sys.local_energy(w);
          if (e.overlap)
            throw simulation_error("dmc: hard-core overlap after an accepted move");
          e_new[k] = e.total;
          weight[k] = std::exp(-tau_eff * (0.5 * (w.e_local + e.total) - e_trial));
          copies[k] = static_cast<std::size_t>(std::floor(weight[k] + rng.uniform()));
          accepted[k] = acc;
        }
      });

      double wsum = 0.0, esum = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        wsum += weight[k];
        esum += weight[k] * e_new[k];
        total_accepted += accepted[k];
        walkers[k].e_local = e_new[k];
      }
      total_proposed += m * c.n_particles;
      const double e_step = esum / wsum;

      if (c.check_overlap)
        for (const auto &w : walkers)
          if (!sys.no_overlap(w))
            throw simulation_error("dmc: hard-core overlap detected at step " + std::to_string(step));

      std::vector<Walker> next;
      std::size_t count = 0;
      for (std::size_t k = 0; k < m; ++k)
        count += copies[k];
      if (static_cast<double>(count) < 0.1 * target || static_cast<double>(count) > 10.0 * target)
        throw simulation_error("dmc: population control failed at step " + std::to_string(step) +
                               " (" + std::to_string(count) + " walkers, target " +
                               std::to_string(c.target_walkers) + ")");
      next.reserve(count);
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t j = 0; j < copies[k]; ++j) {
          next.push_back(walkers[k]);
          next.back().lineage = child_lineage(walkers[k].lineage, step, j);
        }
      walkers = std::move(next);

      block_sum += e_step;
      if (measuring) {
        res.trace.push_back(e_step / n);
        population_sum += static_cast<double>(walkers.size());
      }
      const double feedback = std::clamp(
          kappa / tau * std::log(target / static_cast<double>(walkers.size())),
          -0.1 * std::abs(e_est), 0.1 * std::abs(e_est));
      e_trial = e_est + feedback;
    }
    e_est = block_sum / static_cast<double>(c.steps_per_block);
  }

  res.acceptance =
      total_proposed ? static_cast<double>(total_accepted) / static_cast<double>(total_proposed) : 0.0;
  res.mean_population = population_sum / static_cast<double>(res.trace.size());
  res.energy = detail::blocked(res.trace, EstimateTag::dmc_mixed);
  res.timestep_warning = tau * std::abs(res.energy.mean) >= 0.1;
  res.walkers = std::move(walkers);
  return res;
}

inline EnergyEstimate dmc_run(const DmcConfig &c, const PotentialModel &p) {
  return dmc_simulate(c, p).energy;
}

namespace detail {

inline EnergyEstimate extrapolate_line(std::span<const std::pair<double, EnergyEstimate>> pts,
                                       const char *what) {
  if (pts.size() < 2)
    throw insufficient_data_error(std::string(what) + ": need at least two points");
  std::vector<double> x, y, s;
  if (std::all_of(pts.begin(), pts.end(), [&](const auto &q) { return q.first == pts.front().first; }))
    throw insufficient_data_error(std::string(what) + ": need at least two distinct abscissae");
  for (const auto &[xv, e] : pts) {
    x.push_back(xv);
    y.push_back(e.mean);
    s.push_back(e.err);
  }
  // Noise-free inputs: equal weights.
  const bool exact = std::all_of(s.begin(), s.end(), [](double v) { return v == 0.0; });
  if (exact)
    std::fill(s.begin(), s.end(), 1.0);
  const auto f = stats::weighted_line_fit(x, y, s);
  return {f.intercept, exact ? 0.0 : f.intercept_err, EstimateTag::extrapolated};
}

} // namespace detail

/// Linear extrapolation of the energy to zero timestep.
inline EnergyEstimate extrapolate_timestep(std::span<const std::pair<double, EnergyEstimate>> results) {
  return detail::extrapolate_line(results, "extrapolate_timestep");
}

/// Linear extrapolation in 1/N to the thermodynamic limit.
inline EnergyEstimate
extrapolate_size(std::span<const std::pair<std::size_t, EnergyEstimate>> results) {
  std::vector<std::pair<double, EnergyEstimate>> pts;
  for (const auto &[n, e] : results) {
    if (n == 0)
      throw domain_error("extrapolate_size: particle number must be positive");
    pts.emplace_back(1.0 / static_cast<double>(n), e);
  }
  return detail::extrapolate_line(pts, "extrapolate_size");
}

} // namespace bose2d::dmc
