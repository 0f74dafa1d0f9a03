#pragma once

// Command-line front end: bose2d <eos|compare|fit-c3|dmc|breathing> [options]

#include <exception>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bose2d/errors.hpp"
#include "bose2d/reference.hpp"
#include "bose2d_cli/commands.hpp"
#include "bose2d_cli/output.hpp"

namespace bose2d::cli {

namespace detail {

inline std::vector<eos::ReferenceRow> load_rows(const std::string &path) {
  if (path.empty())
    return eos::table1_dipoles();
  return eos::load_reference_csv(path);
}

} // namespace detail

/// Runs one invocation. `args` excludes the program name.
inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Equation of state of the dilute 2D Bose gas: analytic theories, "
               "reference data, Monte Carlo and trapped-gas breathing mode"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "bose2d 1.0");

  std::string format_name = "csv";
  std::string output;
  auto common = [&](CLI::App *sub) {
    sub->add_option("--format", format_name, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("-o,--output", output,
                    std::string("Output file (default: $") + output_dir_env + "/<command>.<format>, else stdout)");
  };

  auto *eos_cmd = app.add_subcommand("eos", "Beyond-mean-field corrections D(L) of the literature theories");
  std::vector<std::string> theories;
  std::string ln_l = "1:5:0.1";
  eos_cmd->add_option("--theories", theories, "Comma-separated theory names (default: all)")->delimiter(',');
  eos_cmd->add_option("--lnL", ln_l, "Grid in ln|ln na^2| as lo:hi:step");
  common(eos_cmd);

  auto *cmp = app.add_subcommand("compare", "Reference energies against every theory");
  std::string cmp_data;
  cmp->add_option("data", cmp_data, "CSV with columns n_r02,e_per_n,err (default: bundled dipolar table)");
  common(cmp);

  auto *fit = app.add_subcommand("fit-c3", "chi^2 fit of the cubic amplitude coefficient");
  std::string fit_data;
  eos::FitWindow window;
  fit->add_option("data", fit_data, "CSV with columns n_r02,e_per_n,err (default: bundled dipolar table)");
  fit->add_option("--window", window.max_na2, "Largest na^2 included")->check(CLI::PositiveNumber);
  fit->add_option("--min-na2", window.min_na2, "Smallest na^2 included (0: no bound)")
      ->check(CLI::NonNegativeNumber);
  common(fit);

  auto *dmc_cmd = app.add_subcommand("dmc", "VMC and DMC runs from a configuration file");
  std::string config_path;
  bool dry_run = false;
  std::string runs_override;
  dmc_cmd->add_option("config", config_path, "Run configuration (key = value)")->required();
  dmc_cmd->add_flag("--dry-run", dry_run, "Validate and echo the configuration only");
  dmc_cmd->add_option("--runs-csv", runs_override, "Run log (overrides runs_csv in the configuration)");
  common(dmc_cmd);

  auto *br = app.add_subcommand("breathing", "Breathing-mode frequency of the trapped gas within LDA");
  std::string eos_name = "universal";
  std::string lda_grid = "-10:-2:0.5";
  BreathingOptions bopt;
  br->add_option("--eos", eos_name, "mf_linear, mf_schick or universal");
  br->add_option("--log10-lda", lda_grid, "Grid in log10 of sqrt(N) r0^2/a_ho^2 as lo:hi:step");
  br->add_option("--n-particles", bopt.n_particles, "Particle number")->check(CLI::PositiveNumber);
  br->add_option("--coupling", bopt.coupling, "g of mu = g n for mf_linear")->check(CLI::PositiveNumber);
  common(br);

  std::vector<const char *> argv{"bose2d"};
  for (const auto &a : args)
    argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return exit_usage;
  }

  try {
    const auto fmt = parse_format(format_name);
    CommandResult res;
    std::string stem;
    if (eos_cmd->parsed()) {
      res = cmd_eos(theories, parse_range(ln_l));
      stem = "eos";
    } else if (cmp->parsed()) {
      res = cmd_compare(detail::load_rows(cmp_data));
      stem = "compare";
    } else if (fit->parsed()) {
      res = cmd_fit_c3(detail::load_rows(fit_data), window);
      stem = "fit_c3";
    } else if (dmc_cmd->parsed()) {
      const auto plan = dmc::load_run_plan(config_path);
      if (dry_run) {
        res = cmd_dmc_dry_run(plan);
        stem = "dmc_config";
      } else {
        const std::string runs =
            in_output_dir(runs_override.empty() ? plan.runs_csv : runs_override).string();
        res = cmd_dmc(plan, runs, err);
        stem = "dmc";
      }
    } else {
      bopt.eos = trap::parse_eos_choice(eos_name);
      bopt.log10_lda = parse_range(lda_grid);
      res = cmd_breathing(bopt);
      stem = "breathing";
    }
    emit(res.record, fmt, output, stem, out);
    for (const auto &n : res.record.notes)
      if (res.status != exit_ok)
        err << n << "\n";
    return res.status;
  } catch (const parse_error &e) {
    err << "usage error: " << e.what() << "\n";
    return exit_usage;
  } catch (const insufficient_data_error &e) {
    err << "data error: " << e.what() << "\n";
    return exit_data;
  } catch (const simulation_error &e) {
    err << "simulation aborted: " << e.what() << "\n";
    return exit_numeric;
  } catch (const std::exception &e) {
    err << "numeric error: " << e.what() << "\n";
    return exit_numeric;
  }
}

} // namespace bose2d::cli
