#pragma once

// Run configuration and its key-value file format.
//
//   # comment
//   potential       = dipolar        # dipolar | hard_disk | ideal
//   range           = 1              # r0 (dipoles) or core diameter (hard disks)
//   n_particles     = 100
//   density         = 0.0625         # in units of range^-2
//   timesteps       = 0.02, 0.04     # one DMC run per value
//   target_walkers  = 200
//   equil_blocks    = 20
//   measure_blocks  = 100
//   steps_per_block = 20
//   seed            = 12345
//   match_radius    = 0              # 0: box/4
//   workers         = 1
//   run_vmc         = true
//   vmc_step        = 0              # initial VMC displacement, 0: spacing/4
//   init_sweeps     = 200            # VMC sweeps before sampling DMC walkers
//   check_overlap   = false          # verify hard-core exclusion after every step
//   runs_csv        = runs.csv
//   checkpoint      =                # walker positions written here when set
//   restart         =                # walker positions read from here when set

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bose2d/csv.hpp"
#include "bose2d/dmc/guiding.hpp"
#include "bose2d/dmc/potential.hpp"
#include "bose2d/errors.hpp"

namespace bose2d::dmc {

struct DmcConfig {
  std::size_t n_particles = 100;
  double density = 0.0625;
  double timestep = 0.02;
  std::size_t target_walkers = 200;
  std::size_t equil_blocks = 20;
  std::size_t measure_blocks = 100;
  std::size_t steps_per_block = 20;
  std::uint64_t seed = 12345;
  GuidingParams guiding;
  std::size_t workers = 1;
  double vmc_step = 0.0;
  std::size_t init_sweeps = 200;
  bool check_overlap = false;

  double box() const { return std::sqrt(static_cast<double>(n_particles) / density); }

  void validate() const {
    if (n_particles < 2)
      throw parse_error("n_particles: need at least 2");
    if (!(density > 0.0))
      throw parse_error("density: must be positive");
    if (!(timestep > 0.0))
      throw parse_error("timesteps: must be positive");
    if (target_walkers < 1)
      throw parse_error("target_walkers: must be at least 1");
    if (measure_blocks < 1 || steps_per_block < 1)
      throw parse_error("measure_blocks/steps_per_block: must be at least 1");
    if (workers < 1)
      throw parse_error("workers: must be at least 1");
    if (guiding.match_radius < 0.0 || (guiding.match_radius > 0.0 && guiding.match_radius >= 0.5 * box()))
      throw parse_error("match_radius: must lie in (0, box/2), or 0 for box/4");
  }
};

/// Everything a `dmc` command needs: the physics, one config per timestep, and output paths.
struct RunPlan {
  PotentialModel potential;
  DmcConfig config;
  std::vector<double> timesteps{0.02};
  bool run_vmc = true;
  std::string runs_csv = "runs.csv";
  std::string checkpoint;
  std::string restart;
};

namespace detail {

inline bool parse_bool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "1" || v == "yes")
    return true;
  if (v == "false" || v == "0" || v == "no")
    return false;
  throw parse_error(key + ": expected true/false, got '" + v + "'");
}

inline double parse_number(const std::string &key, const std::string &v) {
  try {
    return csv::parse_double(v);
  } catch (const parse_error &) {
    throw parse_error(key + ": expected a number, got '" + v + "'");
  }
}

inline std::uint64_t parse_count(const std::string &key, const std::string &v) {
  std::uint64_t out = 0;
  const auto *end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    throw parse_error(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

} // namespace detail

inline RunPlan parse_run_plan(std::istream &in) {
  RunPlan plan;
  auto &c = plan.config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const auto body = csv::trim(line);
    if (body.empty())
      continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw parse_error("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key(csv::trim(body.substr(0, eq)));
    const std::string val(csv::trim(body.substr(eq + 1)));
    if (key == "potential")
      plan.potential.kind = parse_potential_kind(val);
    else if (key == "range")
      plan.potential.range = detail::parse_number(key, val);
    else if (key == "n_particles")
      c.n_particles = detail::parse_count(key, val);
    else if (key == "density")
      c.density = detail::parse_number(key, val);
    else if (key == "timesteps" || key == "timestep") {
      plan.timesteps.clear();
      for (const auto &t : csv::split(val))
        plan.timesteps.push_back(detail::parse_number(key, t));
      if (plan.timesteps.empty())
        throw parse_error(key + ": empty list");
    } else if (key == "target_walkers")
      c.target_walkers = detail::parse_count(key, val);
    else if (key == "equil_blocks")
      c.equil_blocks = detail::parse_count(key, val);
    else if (key == "measure_blocks")
      c.measure_blocks = detail::parse_count(key, val);
    else if (key == "steps_per_block")
      c.steps_per_block = detail::parse_count(key, val);
    else if (key == "seed")
      c.seed = detail::parse_count(key, val);
    else if (key == "match_radius")
      c.guiding.match_radius = detail::parse_number(key, val);
    else if (key == "workers")
      c.workers = detail::parse_count(key, val);
    else if (key == "run_vmc")
      plan.run_vmc = detail::parse_bool(key, val);
    else if (key == "vmc_step")
      c.vmc_step = detail::parse_number(key, val);
    else if (key == "init_sweeps")
      c.init_sweeps = detail::parse_count(key, val);
    else if (key == "check_overlap")
      c.check_overlap = detail::parse_bool(key, val);
    else if (key == "runs_csv")
      plan.runs_csv = val;
    else if (key == "checkpoint")
      plan.checkpoint = val;
    else if (key == "restart")
      plan.restart = val;
    else
      throw parse_error("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (!(plan.potential.range > 0.0))
    throw parse_error("range: must be positive");
  for (double t : plan.timesteps) {
    c.timestep = t;
    c.validate();
  }
  c.timestep = plan.timesteps.front();
  return plan;
}

inline RunPlan load_run_plan(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw parse_error("cannot open " + path);
  return parse_run_plan(in);
}

/// Inverse of parse_run_plan, used for the dry-run echo.
inline std::string format_run_plan(const RunPlan &p) {
  std::ostringstream o;
  const auto &c = p.config;
  o << "potential = " << to_string(p.potential.kind) << "\n"
    << "range = " << csv::format(p.potential.range) << "\n"
    << "n_particles = " << c.n_particles << "\n"
    << "density = " << csv::format(c.density) << "\n"
    << "timesteps = ";
  for (std::size_t i = 0; i < p.timesteps.size(); ++i)
    o << (i ? ", " : "") << csv::format(p.timesteps[i]);
  o << "\n"
    << "target_walkers = " << c.target_walkers << "\n"
    << "equil_blocks = " << c.equil_blocks << "\n"
    << "measure_blocks = " << c.measure_blocks << "\n"
    << "steps_per_block = " << c.steps_per_block << "\n"
    << "seed = " << c.seed << "\n"
    << "match_radius = " << csv::format(c.guiding.match_radius) << "\n"
    << "workers = " << c.workers << "\n"
    << "run_vmc = " << (p.run_vmc ? "true" : "false") << "\n"
    << "vmc_step = " << csv::format(c.vmc_step) << "\n"
    << "init_sweeps = " << c.init_sweeps << "\n"
    << "check_overlap = " << (c.check_overlap ? "true" : "false") << "\n"
    << "runs_csv = " << p.runs_csv << "\n"
    << "checkpoint = " << p.checkpoint << "\n"
    << "restart = " << p.restart << "\n";
  return o.str();
}

} // namespace bose2d::dmc
