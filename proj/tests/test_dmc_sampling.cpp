#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "bose2d/dmc/config.hpp"
#include "bose2d/dmc/io.hpp"
#include "bose2d/dmc/sampler.hpp"

using namespace bose2d;
using namespace bose2d::dmc;

namespace {

const PotentialModel dipoles{PotentialKind::dipolar, 1.0};

DmcConfig small_config() {
  DmcConfig c;
  c.n_particles = 16;
  c.density = 0.0625;
  c.timestep = 0.1;
  c.target_walkers = 30;
  c.equil_blocks = 2;
  c.measure_blocks = 4;
  c.steps_per_block = 10;
  c.init_sweeps = 50;
  c.seed = 99;
  return c;
}

} // namespace

TEST(Vmc, IdealGasIsExactlyZero) {
  auto c = small_config();
  const auto v = vmc_simulate(c, {PotentialKind::ideal, 1.0});
  EXPECT_EQ(v.energy.mean, 0.0);
  EXPECT_EQ(v.energy.err, 0.0);
  // every move is accepted, which the tuning check flags
  EXPECT_EQ(v.acceptance, 1.0);
  EXPECT_TRUE(v.tuning_warning);
}

TEST(Dmc, IdealGasIsExactlyZero) {
  auto c = small_config();
  const auto d = dmc_simulate(c, {PotentialKind::ideal, 1.0});
  EXPECT_EQ(d.energy.mean, 0.0);
  EXPECT_EQ(d.energy.err, 0.0);
  EXPECT_EQ(d.mean_population, 30.0);
}

TEST(Dmc, TraceIndependentOfWorkerCount) {
  auto c = small_config();
  const auto one = dmc_simulate(c, dipoles);
  c.workers = 3;
  const auto three = dmc_simulate(c, dipoles);
  ASSERT_EQ(one.trace.size(), three.trace.size());
  for (std::size_t k = 0; k < one.trace.size(); ++k)
    EXPECT_EQ(one.trace[k], three.trace[k]) << k;
  EXPECT_EQ(one.energy.mean, three.energy.mean);
  EXPECT_EQ(one.walkers.size(), three.walkers.size());

  c.seed = 100;
  const auto other = dmc_simulate(c, dipoles);
  EXPECT_NE(one.trace.back(), other.trace.back());
}

TEST(Dmc, VariationalOrdering) {
  auto c = small_config();
  c.measure_blocks = 20;
  c.steps_per_block = 20;
  const auto v = vmc_run(c, dipoles);
  const auto d = dmc_run(c, dipoles);
  EXPECT_GE(v.mean, d.mean - 2.0 * std::hypot(v.err, d.err));
  EXPECT_EQ(v.tag, EstimateTag::vmc);
  EXPECT_EQ(d.tag, EstimateTag::dmc_mixed);
}

TEST(Dmc, HardDiskCoreNeverViolated) {
  DmcConfig c;
  c.n_particles = 16;
  c.density = 0.05; // na^2 with a = 1
  c.timestep = 0.01;
  c.target_walkers = 20;
  c.equil_blocks = 0;
  c.measure_blocks = 100;
  c.steps_per_block = 100;
  c.init_sweeps = 50;
  c.check_overlap = true;
  const auto d = dmc_simulate(c, {PotentialKind::hard_disk, 1.0});
  EXPECT_EQ(d.trace.size(), 10000u);
  EXPECT_GT(d.energy.mean, 0.0);
  EXPECT_LT(d.acceptance, 1.0);
}

TEST(Dmc, PopulationCollapseAborts) {
  auto c = small_config();
  const auto start = initial_walkers(c, dipoles);
  const std::vector<Walker> lone{start.front()};
  c.target_walkers = 200;
  EXPECT_THROW(dmc_simulate(c, dipoles, &lone), simulation_error);
}

TEST(Dmc, RejectsMismatchedRestart) {
  auto c = small_config();
  auto start = initial_walkers(c, dipoles);
  c.n_particles = 25;
  EXPECT_THROW(dmc_simulate(c, dipoles, &start), simulation_error);
}

TEST(Vmc, TwoParticlePairDistribution) {
  // |Psi|^2 for two particles: p(r) dr ~ f2(r)^2 r dr for r < box/2
  const System sys(dipoles, 2, 2.0 / 400.0);
  const double half = sys.cutoff();
  detail::VmcChain chain(sys, 5, 8.0);
  const int bins = 10;
  std::vector<double> hist(bins, 0.0);
  double inside = 0.0;
  const int sweeps = 400000;
  for (int s = 0; s < sweeps; ++s) {
    chain.sweep();
    const auto &w = chain.walker();
    const double r = std::hypot(sys.min_image(w.x[0] - w.x[1]), sys.min_image(w.y[0] - w.y[1]));
    if (r < half) {
      hist[static_cast<std::size_t>(r / half * bins)] += 1.0;
      inside += 1.0;
    }
  }
  auto weight = [&](double r) {
    const double f = sys.jastrow().pair_guiding(r);
    return f * f * r;
  };
  using quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double total = quad::integrate(weight, 0.0, half, 10, 1e-12);
  for (int b = 0; b < bins; ++b) {
    const double lo = half * b / bins, hi = half * (b + 1) / bins;
    const double expected = quad::integrate(weight, lo, hi, 10, 1e-12) / total;
    EXPECT_NEAR(hist[b] / inside, expected, 0.03 * expected + 1e-3) << b;
  }
}

TEST(Vmc, LongerBlocksShrinkTheError) {
  auto c = small_config();
  c.equil_blocks = 10;
  c.measure_blocks = 64;
  c.steps_per_block = 20;
  const auto shorter = vmc_run(c, dipoles);
  c.steps_per_block = 40;
  const auto longer = vmc_run(c, dipoles);
  EXPECT_NEAR(longer.mean, shorter.mean, shorter.err + longer.err);
  EXPECT_NEAR(longer.err / shorter.err, 1.0 / std::sqrt(2.0), 0.2);
}

TEST(Config, ParsesAllKeys) {
  std::istringstream in(R"(# comment
potential = hard_disk
range = 2
n_particles = 36   # trailing comment
density = 0.01
timesteps = 0.05, 0.1
target_walkers = 50
equil_blocks = 3
measure_blocks = 7
steps_per_block = 11
seed = 42
match_radius = 5
workers = 2
run_vmc = false
vmc_step = 0.7
init_sweeps = 9
check_overlap = true
runs_csv = out.csv
checkpoint = ck.csv
restart = rs.csv
)");
  const auto p = parse_run_plan(in);
  EXPECT_EQ(p.potential.kind, PotentialKind::hard_disk);
  EXPECT_EQ(p.potential.range, 2.0);
  EXPECT_EQ(p.config.n_particles, 36u);
  EXPECT_EQ(p.config.density, 0.01);
  EXPECT_EQ(p.timesteps, (std::vector<double>{0.05, 0.1}));
  EXPECT_EQ(p.config.timestep, 0.05);
  EXPECT_EQ(p.config.target_walkers, 50u);
  EXPECT_EQ(p.config.equil_blocks, 3u);
  EXPECT_EQ(p.config.measure_blocks, 7u);
  EXPECT_EQ(p.config.steps_per_block, 11u);
  EXPECT_EQ(p.config.seed, 42u);
  EXPECT_EQ(p.config.guiding.match_radius, 5.0);
  EXPECT_EQ(p.config.workers, 2u);
  EXPECT_FALSE(p.run_vmc);
  EXPECT_EQ(p.config.vmc_step, 0.7);
  EXPECT_EQ(p.config.init_sweeps, 9u);
  EXPECT_TRUE(p.config.check_overlap);
  EXPECT_EQ(p.runs_csv, "out.csv");
  EXPECT_EQ(p.checkpoint, "ck.csv");
  EXPECT_EQ(p.restart, "rs.csv");

  std::istringstream again(format_run_plan(p));
  const auto q = parse_run_plan(again);
  EXPECT_EQ(format_run_plan(q), format_run_plan(p));
}

TEST(Config, Rejections) {
  auto parse = [](const char *text) {
    std::istringstream in(text);
    return parse_run_plan(in);
  };
  EXPECT_THROW(parse("colour = red\n"), parse_error);
  EXPECT_THROW(parse("density\n"), parse_error);
  EXPECT_THROW(parse("density = -1\n"), parse_error);
  EXPECT_THROW(parse("n_particles = 1\n"), parse_error);
  EXPECT_THROW(parse("n_particles = 2.5\n"), parse_error);
  EXPECT_THROW(parse("timesteps = 0.1, -0.1\n"), parse_error);
  EXPECT_THROW(parse("run_vmc = maybe\n"), parse_error);
  EXPECT_THROW(parse("potential = gaussian\n"), parse_error);
  EXPECT_THROW(parse("range = 0\n"), parse_error);
  EXPECT_THROW(parse("match_radius = 100\n"), parse_error);
  EXPECT_THROW(load_run_plan("/nonexistent/run.cfg"), parse_error);
  try {
    parse("seed = 1\nbogus = 2\n");
  } catch (const parse_error &e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Config, BundledConfigsLoad) {
  for (const char *name : {"desk_2m4.cfg", "smoke_2m4.cfg"}) {
    const auto p = load_run_plan(std::string(BOSE2D_DATA_DIR) + "/" + name);
    EXPECT_EQ(p.potential.kind, PotentialKind::dipolar);
    EXPECT_EQ(p.config.density, 0.0625);
  }
}

TEST(Io, CheckpointRoundTrip) {
  auto c = small_config();
  const auto walkers = initial_walkers(c, dipoles);
  std::stringstream s;
  write_checkpoint(s, walkers);
  const auto back = read_checkpoint(s, c.seed);
  ASSERT_EQ(back.size(), walkers.size());
  for (std::size_t k = 0; k < walkers.size(); ++k) {
    EXPECT_EQ(back[k].x, walkers[k].x);
    EXPECT_EQ(back[k].y, walkers[k].y);
    EXPECT_EQ(back[k].lineage, walkers[k].lineage);
  }
  // a restart from the written ensemble reproduces a fresh run from the same walkers
  const auto fresh = dmc_simulate(c, dipoles);
  const auto restarted = dmc_simulate(c, dipoles, &back);
  EXPECT_EQ(fresh.trace, restarted.trace);
}

TEST(Io, CheckpointRejectsMalformedInput) {
  auto read = [](const char *text) {
    std::istringstream in(text);
    return read_checkpoint(in, 1);
  };
  EXPECT_THROW(read("a,b,c,d\n0,0,1,1\n"), parse_error);
  EXPECT_THROW(read("walker,particle,x,y\n"), parse_error);
  EXPECT_THROW(read("walker,particle,x,y\n0,1,1,1\n"), parse_error);
  EXPECT_THROW(read("walker,particle,x,y\n1,0,1,1\n"), parse_error);
  EXPECT_THROW(read("walker,particle,x,y\n-1,0,1,1\n"), parse_error);
  EXPECT_THROW(read("walker,particle,x,y\n0,0,1,1\n0,1,2,2\n1,0,3,3\n"), parse_error);
  EXPECT_THROW(read("walker,particle,x,y\n0,0,1,oops\n"), parse_error);
}

TEST(Io, RunsLogHasHeaderOnce) {
  const auto dir = std::filesystem::temp_directory_path() / "bose2d_test_io";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "runs.csv").string();
  std::filesystem::remove(path);
  RunRecord r{PotentialKind::dipolar, 0.0625, 100, 0.05, 200, {0.2334, 1e-4, EstimateTag::dmc_mixed}, 7};
  append_run(path, r);
  r.energy.tag = EstimateTag::extrapolated;
  r.timestep = 0.0;
  append_run(path, r);
  std::ifstream in(path);
  const auto t = csv::read(in);
  EXPECT_EQ(t.header, csv::split(runs_header));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "dipolar");
  EXPECT_EQ(t.rows[0][7], "dmc_mixed");
  EXPECT_EQ(t.rows[1][7], "extrapolated");
  EXPECT_EQ(csv::parse_double(t.rows[1][5]), 0.2334);
  std::filesystem::remove_all(dir);
}
