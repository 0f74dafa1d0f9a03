#pragma once

// Subcommand bodies. Each returns the table to print and an exit status;
// argument parsing and error-to-exit-code mapping live in app.hpp.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bose2d/dmc/config.hpp"
#include "bose2d/dmc/io.hpp"
#include "bose2d/dmc/sampler.hpp"
#include "bose2d/eos.hpp"
#include "bose2d/errors.hpp"
#include "bose2d/reference.hpp"
#include "bose2d/trap.hpp"
#include "bose2d_cli/output.hpp"

namespace bose2d::cli {

struct CommandResult {
  Record record;
  int status = exit_ok;
};

/// "lo:hi:step", inclusive of both ends.
struct RangeSpec {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  std::vector<double> values() const {
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(n + 1));
    for (long long k = 0; k <= n; ++k)
      v.push_back(lo + static_cast<double>(k) * step);
    return v;
  }
};

inline RangeSpec parse_range(const std::string &s) {
  const auto parts = csv::split(s, ':');
  if (parts.size() != 3)
    throw parse_error("range '" + s + "': expected lo:hi:step");
  RangeSpec r;
  try {
    r.lo = csv::parse_double(parts[0]);
    r.hi = csv::parse_double(parts[1]);
    r.step = csv::parse_double(parts[2]);
  } catch (const parse_error &) {
    throw parse_error("range '" + s + "': expected numbers lo:hi:step");
  }
  if (!(r.step > 0.0) || !(r.hi >= r.lo))
    throw parse_error("range '" + s + "': need hi >= lo and step > 0");
  if ((r.hi - r.lo) / r.step > 1e6)
    throw parse_error("range '" + s + "': more than a million points");
  return r;
}

inline std::vector<const eos::TheorySpec *> resolve_theories(const std::vector<std::string> &names) {
  std::vector<const eos::TheorySpec *> out;
  if (names.empty()) {
    for (const auto &t : eos::theories)
      out.push_back(&t);
    return out;
  }
  for (const auto &n : names) {
    const auto id = eos::theory_by_name(n);
    if (!id)
      throw parse_error("unknown theory '" + n + "'");
    out.push_back(&eos::theory_spec(*id));
  }
  return out;
}

namespace detail {

/// Universal-energy ordinate 1/eps - L, or null outside its regime.
inline Cell universal_ordinate(const eos::GasParameter &g) {
  if (!(g.L() > std::numbers::e))
    return {};
  return 1.0 / eos::universal_energy(g) - g.L();
}

inline Cell theory_cell(const eos::TheorySpec &t, const eos::GasParameter &g) {
  try {
    const double d = eos::theory_correction(t, g);
    return std::isfinite(d) ? Cell{d} : Cell{};
  } catch (const regime_error &) {
    return {};
  }
}

} // namespace detail

/// Beyond-mean-field corrections D(L) of the selected theories on a grid of ln L.
inline CommandResult cmd_eos(const std::vector<std::string> &theory_names, const RangeSpec &ln_l) {
  const auto theories = resolve_theories(theory_names);
  CommandResult res;
  auto &r = res.record;
  r.schema_id = "bose2d.eos.v1";
  r.columns = {"ln_lnna2", "L"};
  for (const auto *t : theories)
    r.columns.push_back("D_" + std::string(t->name));
  r.columns.push_back("D_universal");
  std::vector<std::string> nulls;
  for (const double x : ln_l.values()) {
    const auto g = eos::GasParameter::from_L(std::exp(x));
    std::vector<Cell> row{x, g.L()};
    for (const auto *t : theories) {
      row.push_back(detail::theory_cell(*t, g));
      if (std::holds_alternative<std::monostate>(row.back()))
        nulls.push_back(std::string(t->name));
    }
    row.push_back(detail::universal_ordinate(g));
    if (std::holds_alternative<std::monostate>(row.back()))
      nulls.emplace_back("universal");
    r.add_row(std::move(row));
  }
  std::sort(nulls.begin(), nulls.end());
  nulls.erase(std::unique(nulls.begin(), nulls.end()), nulls.end());
  for (const auto &n : nulls) {
    std::string why = "outside its validity";
    if (n == "universal")
      why = "requires L > e";
    else if (const auto id = eos::theory_by_name(n); id && eos::theory_spec(*id).bounded()) {
      const auto &t = eos::theory_spec(*id);
      std::ostringstream w;
      w << "valid only for " << t.ln_L_min.value_or(-INFINITY) << " < ln L < " << t.ln_L_max.value_or(INFINITY);
      why = w.str();
    } else
      why = "undefined at small L";
    r.notes.push_back("null cells in D_" + n + ": " + why);
  }
  return res;
}

/// Rows with ln L at or above this value must agree with the universal equation of state.
inline constexpr double compare_regime_ln_l = 3.0;

/// Reference data against every theory and the universal equation of state.
inline CommandResult cmd_compare(const std::vector<eos::ReferenceRow> &rows) {
  if (rows.empty())
    throw parse_error("compare: no data rows");
  CommandResult res;
  auto &r = res.record;
  r.schema_id = "bose2d.compare.v1";
  r.columns = {"n_r02", "L", "ln_L", "ordinate", "sigma"};
  for (const auto &t : eos::theories)
    r.columns.push_back("D_" + std::string(t.name));
  r.columns.insert(r.columns.end(), {"D_universal", "in_regime", "within_3sigma"});
  int failures = 0;
  for (const auto &row : rows) {
    const auto p = eos::to_dimensionless(row);
    const auto o = eos::fig1_ordinate(row);
    std::vector<Cell> cells{row.n_r02, p.gas.L(), p.gas.ln_L(), o.value, o.sigma};
    for (const auto &t : eos::theories)
      cells.push_back(detail::theory_cell(t, p.gas));
    const Cell u = detail::universal_ordinate(p.gas);
    cells.push_back(u);
    const bool in_regime = p.gas.ln_L() >= compare_regime_ln_l;
    cells.emplace_back(static_cast<long long>(in_regime));
    if (const auto *d = std::get_if<double>(&u)) {
      const bool ok = std::abs(o.value - *d) <= 3.0 * o.sigma;
      cells.emplace_back(static_cast<long long>(ok));
      if (in_regime && !ok)
        ++failures;
    } else {
      cells.emplace_back();
    }
    r.add_row(std::move(cells));
  }
  if (failures) {
    r.notes.push_back(std::to_string(failures) + " in-regime rows outside 3 sigma of the universal equation of state");
    res.status = exit_check_failed;
  }
  return res;
}

inline CommandResult cmd_fit_c3(const std::vector<eos::ReferenceRow> &rows, const eos::FitWindow &w) {
  const auto f = eos::fit_c3(rows, w);
  CommandResult res;
  auto &r = res.record;
  r.schema_id = "bose2d.fit_c3.v1";
  r.columns = {"c3", "c3_err", "chi2_per_dof", "rows_used", "max_na2", "min_na2"};
  r.add_row({f.c3, f.c3_err, f.chi2_per_dof, static_cast<long long>(f.rows_used), w.max_na2, w.min_na2});
  return res;
}

inline std::vector<std::string> runs_columns() {
  return {"potential", "n_r2", "N", "timestep", "walkers", "mean", "err", "tag", "seed"};
}

inline std::vector<Cell> run_cells(const dmc::RunRecord &x) {
  return {std::string(dmc::to_string(x.potential)),
          x.n_r2,
          static_cast<long long>(x.n_particles),
          x.timestep,
          static_cast<long long>(x.walkers),
          x.energy.mean,
          x.energy.err,
          std::string(dmc::to_string(x.energy.tag)),
          std::to_string(x.seed)};
}

/// Echo of a validated run plan.
inline CommandResult cmd_dmc_dry_run(const dmc::RunPlan &plan) {
  CommandResult res;
  auto &r = res.record;
  r.schema_id = "bose2d.dmc_config.v1";
  r.columns = {"key", "value"};
  std::istringstream in(dmc::format_run_plan(plan));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    r.add_row({line.substr(0, eq), line.substr(eq + 3)});
  }
  return res;
}

/// VMC (optional) and DMC at every configured timestep. Each result is appended
/// to `runs_csv` (empty: no log); with two or more timesteps the zero-timestep
/// extrapolation is appended too.
inline CommandResult cmd_dmc(const dmc::RunPlan &plan, const std::string &runs_csv, std::ostream &log) {
  CommandResult res;
  auto &r = res.record;
  r.schema_id = "bose2d.runs.v1";
  r.columns = runs_columns();
  const auto &pot = plan.potential;
  auto c = plan.config;
  auto record = [&](double tau, std::size_t walkers, const dmc::EnergyEstimate &e) {
    const dmc::RunRecord x{pot.kind, c.density, c.n_particles, tau, walkers, e, c.seed};
    r.add_row(run_cells(x));
    if (!runs_csv.empty())
      dmc::append_run(runs_csv, x);
  };

  std::vector<dmc::Walker> restart;
  if (!plan.restart.empty())
    restart = dmc::load_checkpoint(in_output_dir(plan.restart).string(), c.seed);

  if (plan.run_vmc) {
    const auto v = dmc::vmc_simulate(c, pot);
    if (v.tuning_warning)
      log << "warning: VMC acceptance " << v.acceptance << " outside [0.2, 0.9]\n";
    log << "vmc: E/N = " << csv::format(v.energy.mean) << " +- " << csv::format(v.energy.err)
        << " (acceptance " << v.acceptance << ")\n";
    record(0.0, 1, v.energy);
  }

  std::vector<std::pair<double, dmc::EnergyEstimate>> by_tau;
  std::vector<dmc::Walker> last;
  for (const double tau : plan.timesteps) {
    c.timestep = tau;
    const auto d = dmc::dmc_simulate(c, pot, restart.empty() ? nullptr : &restart);
    if (d.timestep_warning)
      log << "warning: timestep " << tau << " is large against the energy scale\n";
    log << "dmc tau=" << tau << ": E/N = " << csv::format(d.energy.mean) << " +- "
        << csv::format(d.energy.err) << " (acceptance " << d.acceptance << ", mean population "
        << d.mean_population << ")\n";
    record(tau, c.target_walkers, d.energy);
    by_tau.emplace_back(tau, d.energy);
    last = d.walkers;
  }
  if (by_tau.size() >= 2) {
    const auto e = dmc::extrapolate_timestep(by_tau);
    log << "extrapolated: E/N = " << csv::format(e.mean) << " +- " << csv::format(e.err) << "\n";
    record(0.0, c.target_walkers, e);
  }
  if (!plan.checkpoint.empty())
    dmc::save_checkpoint(in_output_dir(plan.checkpoint).string(), last);
  return res;
}

struct BreathingOptions {
  trap::EosChoice eos = trap::EosChoice::universal;
  RangeSpec log10_lda{-10.0, -2.0, 0.5};
  double n_particles = 1e4;
  double coupling = 1.0;
};

/// Omega^2/omega^2 against the LDA parameter sqrt(N) r0^2 / a_ho^2 (omega = 1).
inline CommandResult cmd_breathing(const BreathingOptions &o) {
  CommandResult res;
  auto &r = res.record;
  r.schema_id = "bose2d.breathing.v1";
  r.columns = {"lda_param", "omega2_ratio", "eos"};
  for (const double lg : o.log10_lda.values()) {
    trap::TrapConfig t;
    t.n_particles = o.n_particles;
    t.omega = 1.0;
    t.eos = o.eos;
    t.coupling = o.coupling;
    const double lda = std::pow(10.0, lg);
    t.scattering_length = trap::scattering_length_for(lda, t.n_particles, t.omega);
    r.add_row({trap::lda_parameter(t), trap::breathing_frequency(t), std::string(trap::to_string(o.eos))});
  }
  return res;
}

} // namespace bose2d::cli
