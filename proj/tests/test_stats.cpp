#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "bose2d/dmc/sampler.hpp"
#include "bose2d/stats.hpp"

using namespace bose2d;
using namespace bose2d::stats;
using bose2d::dmc::EnergyEstimate;
using bose2d::dmc::EstimateTag;

namespace {

std::vector<double> ar1(std::size_t n, double rho, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<double> v(n);
  double x = 0.0;
  const double s = std::sqrt(1.0 - rho * rho);
  for (auto &e : v) {
    x = rho * x + s * z(gen);
    e = x;
  }
  return v;
}

} // namespace

TEST(Blocking, UncorrelatedMatchesNaiveError) {
  const auto v = ar1(1 << 16, 0.0, 1);
  const auto b = blocking(v);
  const double naive = 1.0 / std::sqrt(static_cast<double>(v.size()));
  EXPECT_NEAR(b.err / naive, 1.0, 0.1);
  EXPECT_TRUE(b.plateau);
  EXPECT_NEAR(b.mean, 0.0, 5.0 * naive);
}

TEST(Blocking, CorrelatedSeriesReachesIntegratedTime) {
  // AR(1): err^2 = (1 + rho)/(1 - rho) / n
  const double rho = 0.9;
  const auto v = ar1(1 << 18, rho, 2);
  const auto b = blocking(v);
  const double expected = std::sqrt((1.0 + rho) / (1.0 - rho) / static_cast<double>(v.size()));
  // the plateau level can hold as few as 64 blocks, about 9% relative uncertainty
  EXPECT_NEAR(b.err / expected, 1.0, 0.25);
  EXPECT_GT(b.level, 2);
  EXPECT_GT(b.err, b.err_by_level.front() * 3.0);
}

TEST(Blocking, ConstantSeriesHasZeroError) {
  const std::vector<double> v(1000, 0.25);
  const auto b = blocking(v);
  EXPECT_EQ(b.mean, 0.25);
  EXPECT_EQ(b.err, 0.0);
}

TEST(Blocking, EmptySeriesThrows) {
  const std::vector<double> v;
  EXPECT_THROW(blocking(v), insufficient_data_error);
}

TEST(LineFit, ExactLine) {
  const std::vector<double> x{0.1, 0.2, 0.4, 0.8}, s{1, 2, 1, 3};
  std::vector<double> y;
  for (double xi : x)
    y.push_back(3.0 - 2.0 * xi);
  const auto f = weighted_line_fit(x, y, s);
  EXPECT_NEAR(f.intercept, 3.0, 1e-13);
  EXPECT_NEAR(f.slope, -2.0, 1e-13);
  EXPECT_NEAR(f.chi2, 0.0, 1e-20);
}

TEST(LineFit, TwoPointClosedForm) {
  // Through (x1,y1),(x2,y2): intercept = (x2 y1 - x1 y2)/(x2 - x1),
  // var = (x2^2 s1^2 + x1^2 s2^2)/(x2 - x1)^2.
  const std::vector<double> x{0.01, 0.02}, y{1.01, 1.02}, s{0.01, 0.01};
  const auto f = weighted_line_fit(x, y, s);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.intercept_err, std::sqrt(5.0) * 0.01, 1e-12);
  EXPECT_NEAR(f.slope, 1.0, 1e-9);
}

TEST(LineFit, Errors) {
  const std::vector<double> one{1.0};
  EXPECT_THROW(weighted_line_fit(one, one, one), insufficient_data_error);
  const std::vector<double> x{1.0, 1.0}, y{1.0, 2.0}, s{1.0, 1.0};
  EXPECT_THROW(weighted_line_fit(x, y, s), insufficient_data_error);
  const std::vector<double> x2{1.0, 2.0}, bad{1.0, 0.0};
  EXPECT_THROW(weighted_line_fit(x2, y, bad), domain_error);
  const std::vector<double> y3{1.0, 2.0, 3.0};
  EXPECT_THROW(weighted_line_fit(x2, y3, s), domain_error);
}

TEST(Extrapolation, TimestepTwoPoints) {
  const std::vector<std::pair<double, EnergyEstimate>> pts{
      {0.01, {1.01, 0.01, EstimateTag::dmc_mixed}}, {0.02, {1.02, 0.01, EstimateTag::dmc_mixed}}};
  const auto e = dmc::extrapolate_timestep(pts);
  EXPECT_NEAR(e.mean, 1.00, 1e-12);
  EXPECT_NEAR(e.err, 0.02, 0.003);
  EXPECT_EQ(e.tag, EstimateTag::extrapolated);
}

TEST(Extrapolation, TimestepFlatAndExact) {
  const std::vector<std::pair<double, EnergyEstimate>> flat{
      {0.02, {0.5, 0.001, EstimateTag::dmc_mixed}}, {0.04, {0.5, 0.001, EstimateTag::dmc_mixed}}};
  EXPECT_NEAR(dmc::extrapolate_timestep(flat).mean, 0.5, 1e-14);

  std::vector<std::pair<double, EnergyEstimate>> exact;
  for (double t : {0.01, 0.03, 0.07})
    exact.push_back({t, {0.23338 + 0.4 * t, 0.0, EstimateTag::dmc_mixed}});
  const auto e = dmc::extrapolate_timestep(exact);
  EXPECT_NEAR(e.mean, 0.23338, 1e-12);
  EXPECT_EQ(e.err, 0.0);
}

TEST(Extrapolation, SizeExactInInverseN) {
  std::vector<std::pair<std::size_t, EnergyEstimate>> pts;
  for (std::size_t n : {100u, 200u, 400u})
    pts.push_back({n, {0.25 + 3.0 / static_cast<double>(n), 0.0, EstimateTag::dmc_mixed}});
  EXPECT_NEAR(dmc::extrapolate_size(pts).mean, 0.25, 1e-12);
}

TEST(Extrapolation, NeedsTwoPoints) {
  const std::vector<std::pair<double, EnergyEstimate>> one{{0.01, {1.0, 0.1, EstimateTag::dmc_mixed}}};
  EXPECT_THROW(dmc::extrapolate_timestep(one), insufficient_data_error);
  const std::vector<std::pair<std::size_t, EnergyEstimate>> single{{100, {1.0, 0.1, EstimateTag::dmc_mixed}}};
  EXPECT_THROW(dmc::extrapolate_size(single), insufficient_data_error);
  const std::vector<std::pair<std::size_t, EnergyEstimate>> same{{100, {1.0, 0.1, EstimateTag::dmc_mixed}},
                                                                 {100, {1.1, 0.1, EstimateTag::dmc_mixed}}};
  EXPECT_THROW(dmc::extrapolate_size(same), insufficient_data_error);
}
