#pragma once

// Error bars for correlated Monte Carlo series and weighted straight-line fits.

#include <cmath>
#include <span>
#include <vector>

#include "bose2d/errors.hpp"

namespace bose2d::stats {

struct BlockingResult {
  double mean = 0.0;
  double err = 0.0;
  int level = 0;          // number of pairwise blockings at the chosen plateau
  bool plateau = false;   // false: error still rising at the last usable level
  std::vector<double> err_by_level;
};

/// Flyvbjerg-Petersen blocking. The series is halved repeatedly; the standard
/// error at each level carries its own uncertainty err/sqrt(2(n-1)). The plateau
/// is the first level whose error is not exceeded, beyond that uncertainty, by
/// any later level with at least `min_blocks` blocks.
inline BlockingResult blocking(std::span<const double> series, std::size_t min_blocks = 16) {
  BlockingResult res;
  if (series.empty())
    throw insufficient_data_error("blocking: empty series");
  std::vector<double> data(series.begin(), series.end());
  double sum = 0.0;
  for (double v : data)
    sum += v;
  res.mean = sum / static_cast<double>(data.size());
  if (data.size() < 2)
    return res;

  std::vector<double> uncertainty;
  while (data.size() >= min_blocks || res.err_by_level.empty()) {
    const auto n = data.size();
    if (n < 2)
      break;
    double m = 0.0;
    for (double v : data)
      m += v;
    m /= static_cast<double>(n);
    double var = 0.0;
    for (double v : data)
      var += (v - m) * (v - m);
    var /= static_cast<double>(n - 1);
    const double e = std::sqrt(var / static_cast<double>(n));
    res.err_by_level.push_back(e);
    uncertainty.push_back(e / std::sqrt(2.0 * static_cast<double>(n - 1)));
    std::vector<double> next(n / 2);
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = 0.5 * (data[2 * i] + data[2 * i + 1]);
    data = std::move(next);
  }

  const int levels = static_cast<int>(res.err_by_level.size());
  for (int k = 0; k < levels; ++k) {
    bool flat = true;
    for (int j = k + 1; j < levels; ++j)
      if (res.err_by_level[j] - res.err_by_level[k] > uncertainty[k] + uncertainty[j]) {
        flat = false;
        break;
      }
    if (flat) {
      res.level = k;
      res.plateau = k + 1 < levels || levels == 1;
      res.err = res.err_by_level[k];
      return res;
    }
  }
  res.level = levels - 1;
  res.err = res.err_by_level.back();
  return res;
}

struct LineFit {
  double intercept;
  double slope;
  double intercept_err;
  double slope_err;
  double chi2;
};

/// Weighted least-squares line y = intercept + slope x with weights 1/sigma^2.
/// Errors come from the inverse normal matrix.
inline LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                                 std::span<const double> sigma) {
  if (x.size() != y.size() || x.size() != sigma.size())
    throw domain_error("weighted_line_fit: size mismatch");
  if (x.size() < 2)
    throw insufficient_data_error("weighted_line_fit: need at least two points");
  double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(sigma[i] > 0.0))
      throw domain_error("weighted_line_fit: sigma must be positive");
    const double w = 1.0 / (sigma[i] * sigma[i]);
    s += w;
    sx += w * x[i];
    sy += w * y[i];
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * y[i];
  }
  const double det = s * sxx - sx * sx;
  if (!(std::abs(det) > 0.0))
    throw insufficient_data_error("weighted_line_fit: abscissae are not distinct");
  LineFit f{};
  f.intercept = (sxx * sy - sx * sxy) / det;
  f.slope = (s * sxy - sx * sy) / det;
  f.intercept_err = std::sqrt(sxx / det);
  f.slope_err = std::sqrt(s / det);
  f.chi2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = (y[i] - f.intercept - f.slope * x[i]) / sigma[i];
    f.chi2 += d * d;
  }
  return f;
}

} // namespace bose2d::stats
