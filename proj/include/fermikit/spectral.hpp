#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "fermikit/floquet.hpp"
#include "fermikit/hermitian_eigen.hpp"
#include "fermikit/parallel.hpp"

namespace fermikit {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains_interior(double x, double margin = 0.0) const { return lo + margin < x && x < hi - margin; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Sorted eigenvalues of the Hermitian Floquet matrix at quasimomentum k.
inline std::vector<double> eigenvalues_at(const PeriodicPotential& v, const std::vector<double>& k) {
  if (!v.is_real()) throw std::invalid_argument("band functions need a real potential");
  const auto e = jacobi_eigen(floquet_matrix_k(v, k));
  return std::vector<double>(e.values.data(), e.values.data() + e.values.size());
}

struct BandStructure {
  PeriodSpec periods;
  int grid = 0;
  std::vector<std::vector<double>> sheets;  // one sorted Q-vector per grid point, row-major
  std::vector<Interval> extents;

  std::size_t point_count() const { return sheets.size(); }
  /// Quasimomentum of grid point idx: k_j = i_j / N with the first axis varying slowest.
  std::vector<double> k_at(std::size_t idx) const {
    const int d = periods.dim();
    std::vector<double> k(static_cast<std::size_t>(d));
    for (int j = d - 1; j >= 0; --j) {
      k[static_cast<std::size_t>(j)] = static_cast<double>(idx % static_cast<std::size_t>(grid)) / grid;
      idx /= static_cast<std::size_t>(grid);
    }
    return k;
  }
};

namespace detail {

inline double sheet_value(const PeriodicPotential& v, std::vector<double> k, std::size_t m, std::size_t axis, double x) {
  k[axis] = x;
  return eigenvalues_at(v, k)[m];
}

/// Golden-section minimisation of f on [a, b] down to width tol.
template <class F>
std::pair<double, double> golden_minimize(F&& f, double a, double b, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

/// Coordinate-wise polish of sign * sheet m starting from k, each search confined to one grid
/// cell either side of the current coordinate.
inline double polish_extremum(const PeriodicPotential& v, std::vector<double> k, std::size_t m, double sign, double h) {
  constexpr double tol = 1e-8;
  double best = sign * eigenvalues_at(v, k)[m];
  for (int cycle = 0; cycle < 20; ++cycle) {
    const double before = best;
    for (std::size_t axis = 0; axis < k.size(); ++axis) {
      auto f = [&](double x) { return sign * sheet_value(v, k, m, axis, x); };
      const auto [x, fx] = golden_minimize(f, k[axis] - h, k[axis] + h, tol);
      if (fx < best) {
        best = fx;
        k[axis] = x;
      }
    }
    if (before - best < 1e-13) break;
  }
  return sign * best;
}

}  // namespace detail

/// Sheets on the uniform N^d grid over [0,1)^d, with band extents from the grid scan followed by
/// golden-section polish around the best grid points of every sheet.
inline BandStructure band_structure(const PeriodicPotential& v, int n) {
  if (!v.is_real()) throw std::invalid_argument("band functions need a real potential");
  if (n < 8) throw std::invalid_argument("band grid needs N >= 8");
  BandStructure bs;
  bs.periods = v.periods();
  bs.grid = n;
  std::size_t points = 1;
  for (int j = 0; j < v.dim(); ++j) {
    points *= static_cast<std::size_t>(n);
    if (points > 5'000'000) throw std::invalid_argument("band grid too large");
  }
  bs.sheets.resize(points);
  parallel_for(points, [&](std::size_t i) { bs.sheets[i] = eigenvalues_at(v, bs.k_at(i)); });

  const std::size_t q = static_cast<std::size_t>(v.volume());
  constexpr int seeds = 3;
  bs.extents.resize(q);
  parallel_for(q, [&](std::size_t m) {
    Interval ext{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    std::vector<std::pair<double, std::size_t>> by_value(points);
    for (std::size_t i = 0; i < points; ++i) by_value[i] = {bs.sheets[i][m], i};
    std::sort(by_value.begin(), by_value.end());
    ext.lo = by_value.front().first;
    ext.hi = by_value.back().first;
    const double h = 1.0 / n;
    for (int s = 0; s < seeds && s < static_cast<int>(points); ++s) {
      ext.lo = std::min(ext.lo, detail::polish_extremum(v, bs.k_at(by_value[static_cast<std::size_t>(s)].second), m, 1.0, h));
      ext.hi = std::max(ext.hi, detail::polish_extremum(v, bs.k_at(by_value[points - 1 - static_cast<std::size_t>(s)].second), m, -1.0, h));
    }
    bs.extents[m] = ext;
  });
  return bs;
}

/// Merges intervals that overlap or touch (within tol) into sorted disjoint intervals.
inline std::vector<Interval> spectrum_union(std::vector<Interval> bands, double tol = 1e-8) {
  std::sort(bands.begin(), bands.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& b : bands) {
    if (!out.empty() && b.lo <= out.back().hi + tol)
      out.back().hi = std::max(out.back().hi, b.hi);
    else
      out.push_back(b);
  }
  return out;
}

inline std::vector<Interval> spectrum_union(const BandStructure& bs, double tol = 1e-8) { return spectrum_union(bs.extents, tol); }

/// True iff lambda lies in the open interior of some band of the free Laplacian computed with the
/// given periods (bands refined to 1e-8).
inline bool in_band_interior(const PeriodSpec& periods, double lambda, int n = 16) {
  const auto bs = band_structure(PeriodicPotential::zero(periods), n);
  return std::any_of(bs.extents.begin(), bs.extents.end(), [&](const Interval& b) { return b.contains_interior(lambda, 1e-8); });
}

/// CSV of the sheets: k_1..k_d then lambda_1..lambda_Q, one row per grid point.
inline void write_sheets_csv(std::ostream& os, const BandStructure& bs) {
  const auto old_precision = os.precision(15);
  const int d = bs.periods.dim();
  for (int j = 1; j <= d; ++j) os << "k_" << j << ',';
  const std::size_t q = bs.extents.size();
  for (std::size_t m = 1; m <= q; ++m) os << "lambda_" << m << (m == q ? '\n' : ',');
  for (std::size_t i = 0; i < bs.sheets.size(); ++i) {
    for (double kj : bs.k_at(i)) os << kj << ',';
    for (std::size_t m = 0; m < q; ++m) os << bs.sheets[i][m] << (m + 1 == q ? '\n' : ',');
  }
  os.precision(old_precision);
}

}  // namespace fermikit
