// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bose2d/dmc/config.hpp"
#include "bose2d/dmc/sampler.hpp"
#include "bose2d/eos.hpp"
#include "bose2d/reference.hpp"
#include "bose2d/specfun.hpp"
#include "bose2d/trap.hpp"
#include "bose2d_cli/commands.hpp"

using namespace bose2d;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i)
    g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

// e^x Γ(0,x) = ∫_0^∞ e^{-s}/(x+s) ds
double e1_scaled_oracle(double x) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([x](double s) { return std::exp(-s) / (x + s); }, 1e-15);
}

// K0(x) = ∫_0^∞ exp(-x cosh t) dt
double k0_oracle(double x) {
  const double tmax = std::acosh(1.0 + 750.0 / x);
  auto f = [x](double t) { return std::exp(-x * std::cosh(t)); };
  double sum = 0.0;
  const int pieces = 16;
  for (int i = 0; i < pieces; ++i)
    sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, tmax * i / pieces,
                                                                          tmax * (i + 1) / pieces, 10, 1e-15);
  return sum;
}

// u = 1/(rhs - ln u), iterated from the mean-field guess
double cherny_fixed_point(double rhs) {
  double u = 1.0 / rhs;
  for (int k = 0; k < 10000; ++k) {
    const double next = 1.0 / (rhs - std::log(u));
    if (std::abs(next - u) <= 1e-17 * u)
      return next;
    u = next;
  }
  return u;
}

constexpr double table_e_2m4 = 0.23338;

Verdict universal_vs_table() {
  int rows = 0, failed = 0;
  double worst = 0.0;
  for (const auto &r : eos::table1_dipoles()) {
    if (r.n_r02 > 1e-13)
      continue;
    ++rows;
    const auto p = eos::to_dimensionless(r);
    const double pred = 1.0 / eos::universal_energy(p.gas);
    const double sigma = (1.0 / p.eps) * (r.err / r.e_per_n);
    const double dev = std::abs(pred - 1.0 / p.eps);
    const double tol = std::max(3.0 * sigma, 0.1);
    worst = std::max(worst, dev / tol);
    if (dev > tol)
      ++failed;
  }
  return {rows > 0 && failed == 0, fmt("%d rows, %d outside tolerance, worst |d|/tol = %.3f", rows, failed, worst)};
}

Verdict c3_fit() {
  const auto f = eos::fit_c3(eos::table1_dipoles());
  return {f.c3 >= 1.7 && f.c3 <= 2.3,
          fmt("c3 = %.4f +- %.4f (%d rows, chi2/dof %.2f)", f.c3, f.c3_err, f.rows_used, f.chi2_per_dof)};
}

Verdict special_functions() {
  double g_err = 0.0, k_err = 0.0, branch = 0.0;
  for (double x : log_grid(1.0, 500.0, 200))
    g_err = std::max(g_err, std::abs(specfun::gamma_upper_zero_scaled(x) / e1_scaled_oracle(x) - 1.0));
  for (double x : log_grid(0.01, 30.0, 200))
    k_err = std::max(k_err, std::abs(specfun::bessel_k0(x) * std::exp(x) / (k0_oracle(x) * std::exp(x)) - 1.0));
  const specfun::AccuracyPolicy policy;
  const double c = policy.series_asymptotic_crossover;
  for (double x = 0.8 * c; x <= 1.2 * c + 1e-9; x += 0.01 * c) {
    const double a = specfun::gamma_upper_zero_scaled_branch(x, specfun::GammaBranch::asymptotic);
    const double s = specfun::gamma_upper_zero_scaled_branch(x, specfun::GammaBranch::series_or_fraction);
    branch = std::max(branch, std::abs(a / s - 1.0));
  }
  // K0 switches from the series to the continued fraction at x = 2
  for (double x : {2.0 - 1e-12, 2.0, 2.0 + 1e-12})
    branch = std::max(branch, std::abs(specfun::bessel_k0(x) / k0_oracle(x) - 1.0));
  return {g_err <= 1e-10 && k_err <= 1e-10 && branch <= 1e-11,
          fmt("max rel err Gamma(0,x) %.2e, K0 %.2e, branch crossover %.2e", g_err, k_err, branch)};
}

Verdict mean_field_consistency() {
  double worst = 0.0;
  for (double L = 20.0; L <= 200.0 + 1e-9; L += 1.0) {
    const auto g = eos::GasParameter::from_L(L);
    worst = std::max(worst, std::abs(eos::energy_mf_integrated(g) / eos::energy_mf_expansion(g) - 1.0));
  }
  return {worst <= 1e-4, fmt("max relative difference %.2e on L in [20, 200]", worst)};
}

Verdict cherny_solver() {
  double residual = 0.0;
  bool monotone = true;
  double prev = INFINITY;
  for (int k = 0; k < 100; ++k) {
    const double L = 5.0 + 495.0 * k / 99.0;
    const auto g = eos::GasParameter::from_L(L);
    const double u = eos::cherny_u(g);
    residual = std::max(residual, std::abs(1.0 / u + std::log(u) - eos::cherny_rhs(g)));
    monotone = monotone && u < prev;
    prev = u;
  }
  const auto g = eos::GasParameter::from_L(43.7428);
  const double u = eos::cherny_u(g);
  const double oracle = cherny_fixed_point(eos::cherny_rhs(g));
  const bool ok = residual <= 1e-12 && monotone && std::abs(u - 0.0220965) <= 1e-6 && std::abs(u - oracle) <= 1e-6;
  return {ok, fmt("max residual %.2e, %s, u(43.7428) = %.9f (fixed point %.9f)", residual,
                  monotone ? "strictly decreasing" : "NOT monotone", u, oracle)};
}

Verdict cancellation_point() {
  const double L = eos::universal_cancellation_L();
  return {L >= 11.0 && L <= 16.0, fmt("root L = %.4f (na^2 = 10^%.2f)", L, -L / std::log(10.0))};
}

struct DeskRun {
  dmc::VmcResult vmc;
  std::vector<std::pair<double, dmc::DmcResult>> dmc;
  dmc::EnergyEstimate extrapolated;
};

std::optional<DeskRun> desk;

Verdict dmc_reproduction() {
  const auto plan = dmc::load_run_plan(std::string(BOSE2D_DATA_DIR) + "/desk_2m4.cfg");
  auto c = plan.config;
  DeskRun run;
  const auto t0 = std::chrono::steady_clock::now();
  run.vmc = dmc::vmc_simulate(c, plan.potential);
  std::vector<std::pair<double, dmc::EnergyEstimate>> pts;
  for (double tau : plan.timesteps) {
    c.timestep = tau;
    run.dmc.emplace_back(tau, dmc::dmc_simulate(c, plan.potential));
    pts.emplace_back(tau, run.dmc.back().second.energy);
  }
  run.extrapolated = dmc::extrapolate_timestep(pts);
  const double desk_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  desk = run;

  const auto smoke = dmc::load_run_plan(std::string(BOSE2D_DATA_DIR) + "/smoke_2m4.cfg");
  const auto t1 = std::chrono::steady_clock::now();
  auto sc = smoke.config;
  sc.timestep = smoke.timesteps.front();
  const auto s = dmc::dmc_run(sc, smoke.potential);
  const double smoke_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();

  const double dev = run.extrapolated.mean / table_e_2m4 - 1.0;
  const double sdev = s.mean / table_e_2m4 - 1.0;
  const bool ok = plan.timesteps.size() >= 2 && std::abs(dev) <= 0.01 && desk_s <= 3600.0 &&
                  smoke.timesteps.size() == 1 && smoke.config.n_particles == 36 && std::abs(sdev) <= 0.03 &&
                  smoke_s <= 300.0;
  return {ok, fmt("N=100 extrapolated E/N = %.6f +- %.6f (%+.2f%%, %.0f s); N=36 smoke %.6f +- %.6f (%+.2f%%, %.0f s)",
                  run.extrapolated.mean, run.extrapolated.err, 100.0 * dev, desk_s, s.mean, s.err, 100.0 * sdev,
                  smoke_s)};
}

Verdict dmc_hygiene() {
  std::ostringstream d;
  bool ok = true;
  if (desk) {
    for (const auto &[tau, r] : desk->dmc) {
      const double slack = 2.0 * std::hypot(desk->vmc.energy.err, r.energy.err);
      const bool v = desk->vmc.energy.mean >= r.energy.mean - slack;
      ok = ok && v;
      d << "vmc " << desk->vmc.energy.mean << " vs dmc(tau=" << tau << ") " << r.energy.mean << (v ? " ok" : " VIOLATED")
        << "; ";
    }
  } else {
    ok = false;
    d << "desk run missing; ";
  }

  dmc::DmcConfig c;
  c.n_particles = 16;
  c.target_walkers = 40;
  c.equil_blocks = 2;
  c.measure_blocks = 5;
  c.steps_per_block = 10;
  c.init_sweeps = 50;
  c.timestep = 0.1;
  const dmc::PotentialModel dip{dmc::PotentialKind::dipolar, 1.0};
  const auto ref = dmc::dmc_simulate(c, dip).trace;
  bool same = true;
  for (std::size_t w : {2u, 4u}) {
    c.workers = w;
    same = same && dmc::dmc_simulate(c, dip).trace == ref;
  }
  ok = ok && same;
  d << (same ? "traces bit-identical for 1/2/4 workers; " : "traces DIFFER across worker counts; ");

  dmc::DmcConfig h;
  h.n_particles = 16;
  h.density = 0.05;
  h.timestep = 0.01;
  h.target_walkers = 20;
  h.equil_blocks = 0;
  h.measure_blocks = 100;
  h.steps_per_block = 100;
  h.init_sweeps = 50;
  h.check_overlap = true;
  try {
    const auto r = dmc::dmc_simulate(h, {dmc::PotentialKind::hard_disk, 1.0});
    d << "hard disks: " << r.trace.size() << " checked steps, no overlap";
  } catch (const simulation_error &e) {
    ok = false;
    d << "hard disks: " << e.what();
  }
  return {ok, d.str()};
}

Verdict scattering_length() {
  const double a = dmc::scattering_length_check({dmc::PotentialKind::dipolar, 1.0});
  const double rel = std::abs(a / 3.17222 - 1.0);
  return {rel <= 1e-4, fmt("a = %.7f r0 (relative deviation %.1e)", a, rel)};
}

Verdict breathing_mode() {
  using namespace trap;
  TrapConfig lin;
  lin.eos = EosChoice::mf_linear;
  const double linear = breathing_frequency(lin);
  const double ideal =
      sum_rule_ratio([](double w2) { return ideal_mean_square_radius(std::sqrt(w2)); }, 1.0);

  auto at = [](EosChoice e, double lda, double step = 1e-4) {
    TrapConfig t;
    t.eos = e;
    t.scattering_length = scattering_length_for(lda, t.n_particles, t.omega);
    return breathing_frequency(t, step);
  };
  double robust = 0.0;
  for (auto e : {EosChoice::mf_linear, EosChoice::mf_schick, EosChoice::universal})
    for (double lda : {1e-10, 1e-6, 1e-2})
      robust = std::max(robust, std::abs(at(e, lda, 1e-4) - at(e, lda, 2e-4)));

  std::vector<double> y;
  for (double lg = -10.0; lg <= -2.0 + 1e-9; lg += 0.25)
    y.push_back(at(EosChoice::universal, std::pow(10.0, lg)));
  bool monotone = true, smooth = true;
  for (std::size_t k = 1; k < y.size(); ++k) {
    monotone = monotone && y[k] > y[k - 1];
    if (k > 1)
      smooth = smooth && std::abs((y[k] - y[k - 1]) - (y[k - 1] - y[k - 2])) < std::max(y[k] - y[k - 1], y[k - 1] - y[k - 2]);
  }
  // weak-interaction limit: the deviation from 4 keeps shrinking
  std::vector<double> limit;
  for (double lda : {1e-10, 1e-30, 1e-100, 1e-300})
    limit.push_back(at(EosChoice::universal, lda) - 4.0);
  bool to_four = limit.back() < 0.01;
  for (std::size_t k = 1; k < limit.size(); ++k)
    to_four = to_four && limit[k] > 0.0 && limit[k] < limit[k - 1];

  const bool ok = std::abs(linear - 4.0) <= 1e-3 && std::abs(ideal - 4.0) <= 1e-3 && robust <= 1e-3 && monotone &&
                  smooth && to_four && y.back() - y.front() > 1e-3;
  return {ok, fmt("linear %.6f, ideal %.6f, step robustness %.1e; universal sweep %.4f..%.4f %s%s; "
                  "Omega^2/omega^2 - 4 = %.4f at lda 1e-300",
                  linear, ideal, robust, y.front(), y.back(), monotone ? "monotone" : "NOT monotone",
                  smooth ? ", smooth" : ", NOT smooth", limit.back())};
}

Verdict characteristic_density() {
  const double m2 = eos::characteristic_density(2.0), m3 = eos::characteristic_density(3.0);
  const bool ok = std::abs(m2 + 68.6) <= 0.05 && std::abs(m3 + 861.9) <= 0.1 && std::round(m2) == -69.0 &&
                  std::round(m3) == -862.0;
  return {ok, fmt("m=2: 10^%.3f, m=3: 10^%.3f", m2, m3)};
}

struct Criterion {
  int id;
  const char *name;
  double budget_s;
  std::function<Verdict()> check;
};

} // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "universal EOS vs reference table", 1.0, universal_vs_table},
      {2, "c3 fit", 1.0, c3_fit},
      {3, "special functions vs quadrature", 10.0, special_functions},
      {4, "mean-field integrated vs expansion", 1.0, mean_field_consistency},
      {5, "in-medium amplitude solver", 1.0, cherny_solver},
      {6, "BMF cancellation point", 1.0, cancellation_point},
      {7, "DMC desk-scale reproduction", 3900.0, dmc_reproduction},
      {8, "DMC statistical hygiene", 600.0, dmc_hygiene},
      {9, "scattering length", 1.0, scattering_length},
      {10, "breathing mode", 30.0, breathing_mode},
      {11, "characteristic density", 1.0, characteristic_density},
  };
  int failures = 0;
  for (const auto &c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception &e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s > c.budget_s) {
      v.pass = false;
      v.detail += fmt(" [over time budget %.0f s]", c.budget_s);
    }
    failures += !v.pass;
    std::printf("%s #%d %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures ? 1 : 0;
}
