#pragma once

// Dipolar DMC energies per particle in the thermodynamic limit, and the fit of
// the cubic coefficient of the in-medium amplitude series.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bose2d/csv.hpp"
#include "bose2d/eos.hpp"

namespace bose2d::eos {

/// One tabulated DMC point: density n r0^2, E/N and its one-sigma error in
/// units hbar^2/(m r0^2).
struct ReferenceRow {
  double n_r02;
  double e_per_n;
  double err;
};

/// Reference data converted to the dimensionless eps and its error.
struct DimensionlessPoint {
  GasParameter gas;
  double eps;
  double sigma;
};

/// eps = (E/N)/(2 pi n r0^2) with hbar^2/m = 1.
inline DimensionlessPoint to_dimensionless(const ReferenceRow &r) {
  const double scale = 2.0 * pi * r.n_r02;
  return {from_density_dipoles(r.n_r02), r.e_per_n / scale, r.err / scale};
}

/// Ordinate 1/eps - L with its propagated one-sigma error (1/eps)(err/E).
struct Ordinate {
  double value;
  double sigma;
};

inline Ordinate fig1_ordinate(const ReferenceRow &r) {
  const auto p = to_dimensionless(r);
  return {fig1_ordinate(p.eps, p.gas), (1.0 / p.eps) * (r.err / r.e_per_n)};
}

inline std::vector<ReferenceRow> parse_reference_csv(std::istream &in) {
  const auto t = csv::read(in);
  if (t.header.empty())
    throw parse_error("reference data: empty file");
  const auto cn = t.column("n_r02");
  const auto ce = t.column("e_per_n");
  const auto cs = t.column("err");
  std::vector<ReferenceRow> rows;
  rows.reserve(t.rows.size());
  for (const auto &cells : t.rows) {
    ReferenceRow r{csv::parse_double(cells[cn]), csv::parse_double(cells[ce]),
                   csv::parse_double(cells[cs])};
    if (!(r.n_r02 > 0.0 && r.e_per_n > 0.0 && r.err > 0.0))
      throw parse_error("reference data: values must be positive");
    rows.push_back(r);
  }
  if (rows.empty())
    throw parse_error("reference data: no rows");
  return rows;
}

inline std::vector<ReferenceRow> load_reference_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw parse_error("cannot open " + path);
  return parse_reference_csv(in);
}

/// Verbatim copy of data/table1_dipoles.csv.
inline constexpr const char *table1_dipoles_csv =
    "n_r02,e_per_n,err\n"
    "0.0625,0.23338,9e-5\n"
    "0.03125,0.095917,38e-6\n"
    "0.015625,0.039924,16e-6\n"
    "0.0078125,0.016817,7e-6\n"
    "0.00390625,0.0071709,28e-7\n"
    "0.001953125,0.0030943,12e-7\n"
    "0.0009765625,0.0013491,5e-7\n"
    "0.00048828125,5.9355e-4,24e-8\n"
    "0.000244140625,2.6408e-4,10e-8\n"
    "0.0001220703125,1.1846e-4,5e-8\n"
    "0.00006103515625,5.3611e-5,21e-9\n"
    "0.000030517578125,2.4421e-5,10e-9\n"
    "0.0000152587890625,1.1206e-5,4e-9\n"
    "0.00000762939453125,5.1710e-6,21e-10\n"
    "0.000003814697265625,2.3987e-6,10e-10\n"
    "0.0000019073486328125,1.1179e-6,4e-10\n"
    "9.5367431640625E-7,5.2340e-7,21e-11\n"
    "4.76837158203125E-7,2.4604e-7,10e-11\n"
    "2.384185791015625E-7,1.1604e-7,5e-11\n"
    "1.1920928955078125E-7,5.4925e-8,22e-12\n"
    "5.9604644775390625E-8,2.6070e-8,10e-12\n"
    "2.98023223876953125E-8,1.2402e-8,5e-12\n"
    "1.490116119384765625E-8,5.9130e-9,24e-13\n"
    "7.450580596923828125E-9,2.8268e-9,11e-13\n"
    "3.7252902984619140625E-9,1.3536e-9,5e-13\n"
    "1.86264514923095703125E-9,6.4953e-10,26e-14\n"
    "9.31322574615478515625E-10,3.1218e-10,12e-14\n"
    "4.656612873077392578125E-10,1.5029e-10,6e-14\n"
    "2.3283064365386962890625E-10,7.2448e-11,29e-15\n"
    "3e-11,8.4396e-12,51e-16\n"
    "3e-12,7.6254e-13,46e-17\n"
    "1e-13,2.2249e-14,13e-18\n"
    "1e-15,1.9048e-16,11e-20\n"
    "1e-17,1.6659e-18,10e-22\n"
    "1e-20,1.4028e-21,3e-25\n"
    "1e-25,1.1116e-26,2e-30\n"
    "1e-33,8.3539e-35,34e-39\n"
    "1e-50,5.4752e-52,22e-56\n"
    "1e-67,4.0746e-69,16e-73\n"
    "1e-100,2.7251e-102,10e-106\n";

inline const std::vector<ReferenceRow> &table1_dipoles() {
  static const std::vector<ReferenceRow> rows = [] {
    std::istringstream in(table1_dipoles_csv);
    return parse_reference_csv(in);
  }();
  return rows;
}

// ---------------------------------------------------------------------------
// chi^2 fit of c3 in eps = u + u^2/2 - c3 u^3

struct FitWindow {
  double max_na2 = 1e-6;
  double min_na2 = 0.0;

  bool contains(const GasParameter &g) const {
    if (g.log_na2() > std::log(max_na2))
      return false;
    return min_na2 <= 0.0 || g.log_na2() >= std::log(min_na2);
  }
};

struct FitResult {
  double c3;
  double c3_err;
  double chi2_per_dof;
  int rows_used;
};

/// Weighted linear least squares in the single parameter c3 (closed form);
/// c3_err from the curvature of chi^2.
inline FitResult fit_c3(const std::vector<ReferenceRow> &rows, const FitWindow &window = {}) {
  struct Point {
    double x;
    double r;
    double w;
  };
  std::vector<Point> pts;
  for (const auto &row : rows) {
    const auto p = to_dimensionless(row);
    if (!window.contains(p.gas))
      continue;
    if (cherny_rhs(p.gas) < 1.0)
      continue; // amplitude expansion undefined at these densities
    const double u = cherny_u(p.gas);
    pts.push_back({-u * u * u, p.eps - u - 0.5 * u * u, 1.0 / (p.sigma * p.sigma)});
  }
  if (pts.size() < 3)
    throw insufficient_data_error("fit_c3: fewer than 3 rows inside the window");
  double sxr = 0.0;
  double sxx = 0.0;
  for (const auto &p : pts) {
    sxr += p.w * p.x * p.r;
    sxx += p.w * p.x * p.x;
  }
  const double c3 = sxr / sxx;
  double chi2 = 0.0;
  for (const auto &p : pts) {
    const double d = p.r - c3 * p.x;
    chi2 += p.w * d * d;
  }
  const int n = static_cast<int>(pts.size());
  return {c3, 1.0 / std::sqrt(sxx), chi2 / (n - 1), n};
}

} // namespace bose2d::eos
