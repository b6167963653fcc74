#pragma once

// Shared generators for the test suites.

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "fermikit/gaussian_rational.hpp"
#include "fermikit/lattice.hpp"
#include "fermikit/laurent.hpp"

namespace fktest {

using fermikit::ExactPoly;
using fermikit::GaussianRational;
using fermikit::PeriodicPotential;
using fermikit::PeriodSpec;

inline GaussianRational random_rational(std::mt19937_64& rng, int num = 5, int den = 3) {
  std::uniform_int_distribution<int> n(-num, num), d(1, den);
  return GaussianRational::from_ratio(n(rng), d(rng));
}

inline GaussianRational random_gaussian(std::mt19937_64& rng, int num = 5, int den = 3) {
  return GaussianRational(random_rational(rng, num, den).real(), random_rational(rng, num, den).real());
}

/// Real exact potential with small rational values; never constant when Q > 1.
inline PeriodicPotential random_real_potential(const PeriodSpec& p, std::mt19937_64& rng, int num = 5, int den = 3) {
  for (;;) {
    std::vector<GaussianRational> vals;
    for (int i = 0; i < p.volume(); ++i) vals.push_back(random_rational(rng, num, den));
    bool constant = true;
    for (const auto& x : vals) constant = constant && x == vals.front();
    if (!constant || p.volume() == 1) return PeriodicPotential::exact(p, std::move(vals));
  }
}

inline PeriodicPotential random_complex_potential(const PeriodSpec& p, std::mt19937_64& rng) {
  std::vector<GaussianRational> vals;
  for (int i = 0; i < p.volume(); ++i) vals.push_back(random_gaussian(rng));
  return PeriodicPotential::exact(p, std::move(vals));
}

/// Sparse random Laurent polynomial: `terms` terms, exponents in [-span, span], lambda in [0, span].
inline ExactPoly random_poly(int dim, std::mt19937_64& rng, int terms = 4, int span = 2, bool with_lambda = true) {
  std::uniform_int_distribution<int> e(-span, span), l(0, span);
  std::vector<ExactPoly::Term> raw;
  for (int t = 0; t < terms; ++t) {
    fermikit::Exponent x{};
    for (int j = 0; j < dim; ++j) x[j] = static_cast<std::int16_t>(e(rng));
    if (with_lambda) x[dim] = static_cast<std::int16_t>(l(rng));
    raw.push_back({x, random_gaussian(rng, 4, 2)});
  }
  return ExactPoly::from_terms(dim, std::move(raw));
}

inline std::vector<std::complex<double>> random_torus_point(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::complex<double>> z;
  for (int j = 0; j < dim; ++j) z.push_back(std::polar(1.0, 2.0 * 3.141592653589793 * u(rng)));
  return z;
}

inline std::vector<std::complex<double>> random_complex_point(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r(0.5, 1.5), u(0.0, 1.0);
  std::vector<std::complex<double>> z;
  for (int j = 0; j < dim; ++j) z.push_back(std::polar(r(rng), 2.0 * 3.141592653589793 * u(rng)));
  return z;
}

}  // namespace fktest
