#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fermikit/determinant.hpp"
#include "fermikit/lattice.hpp"
#include "fermikit/laurent.hpp"
#include "fermikit/parallel.hpp"

namespace fermikit {

using Complex = std::complex<double>;

/// Calls hop(row, col, axis, power) for every nearest-neighbour hop out of each site of W under
/// the boundary condition u(n + q_j e_j) = z_j u(n). The entry contributed is -z_axis^power;
/// power is 0 for hops that stay inside W, +1 for a wrap leaving through n_j = q_j - 1 and -1
/// for a wrap leaving through n_j = 0. With q_j = 1 both wraps land on the diagonal.
template <class Hop>
void for_each_hop(const PeriodSpec& periods, Hop&& hop) {
  const auto& w = periods.domain();
  for (int row = 0; row < periods.volume(); ++row) {
    const Site& n = w[static_cast<std::size_t>(row)];
    for (int j = 0; j < periods.dim(); ++j) {
      const int qj = periods.period(j);
      for (int dir : {+1, -1}) {
        Site m = n;
        m[static_cast<std::size_t>(j)] += dir;
        const int mj = m[static_cast<std::size_t>(j)];
        const int power = mj >= qj ? 1 : (mj < 0 ? -1 : 0);
        hop(row, periods.index_of(m), j, power);
      }
    }
  }
}

/// Symbolic Floquet matrix of -Delta + V restricted to W, entries Laurent polynomials in z.
inline Matrix<ExactPoly> floquet_matrix(const PeriodicPotential& v) {
  if (!v.is_exact()) throw std::invalid_argument("symbolic Floquet matrix needs exact potential values");
  const int d = v.dim(), n = v.volume();
  Matrix<ExactPoly> m(static_cast<std::size_t>(n), std::vector<ExactPoly>(static_cast<std::size_t>(n), ExactPoly(d)));
  for (int i = 0; i < n; ++i)
    m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] =
        ExactPoly::constant(d, v.exact_values()[static_cast<std::size_t>(i)]);
  for_each_hop(v.periods(), [&](int row, int col, int axis, int power) {
    auto& e = m[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
    e -= ExactPoly::z(d, axis, power);
  });
  return m;
}

/// Floquet matrix evaluated at z in (C*)^d.
inline Eigen::MatrixXcd floquet_matrix_at(const PeriodicPotential& v, const std::vector<Complex>& z) {
  if (static_cast<int>(z.size()) != v.dim()) throw std::invalid_argument("quasimomentum has wrong dimension");
  const int n = v.volume();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = v.values()[static_cast<std::size_t>(i)];
  for_each_hop(v.periods(), [&](int row, int col, int axis, int power) {
    const Complex zj = z[static_cast<std::size_t>(axis)];
    m(row, col) -= power == 0 ? Complex(1.0) : (power > 0 ? zj : 1.0 / zj);
  });
  return m;
}

/// D_V(k): the Floquet matrix at z_j = exp(2 pi i k_j).
inline Eigen::MatrixXcd floquet_matrix_k(const PeriodicPotential& v, const std::vector<double>& k) {
  std::vector<Complex> z(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) z[j] = std::polar(1.0, 2.0 * std::numbers::pi * k[j]);
  return floquet_matrix_at(v, z);
}

/// det(D_V(z) - lambda I) as an exact Laurent polynomial in z and lambda.
inline ExactPoly characteristic_polynomial(const PeriodicPotential& v) {
  auto m = floquet_matrix(v);
  const ExactPoly lam = ExactPoly::lambda(v.dim());
  for (std::size_t i = 0; i < m.size(); ++i) m[i][i] -= lam;
  return bareiss_determinant(std::move(m));
}

/// det(D_V(z) - lambda0 I) with lambda0 fixed, as a Laurent polynomial in z alone.
inline ExactPoly characteristic_polynomial_at(const PeriodicPotential& v, const GaussianRational& lambda0) {
  auto m = floquet_matrix(v);
  const ExactPoly shift = ExactPoly::constant(v.dim(), lambda0);
  for (std::size_t i = 0; i < m.size(); ++i) m[i][i] -= shift;
  return bareiss_determinant(std::move(m));
}

/// Same polynomial as characteristic_polynomial, by cofactor expansion (small Q only).
inline ExactPoly characteristic_polynomial_cofactor(const PeriodicPotential& v) {
  auto m = floquet_matrix(v);
  const ExactPoly lam = ExactPoly::lambda(v.dim());
  for (std::size_t i = 0; i < m.size(); ++i) m[i][i] -= lam;
  return cofactor_determinant(m);
}

/// Exact det(D_V(z) - lambda I) at a Gaussian-rational point, by elimination over Q(i).
inline GaussianRational characteristic_value(const PeriodicPotential& v, const std::vector<GaussianRational>& z,
                                             const GaussianRational& lambda) {
  if (!v.is_exact()) throw std::invalid_argument("exact evaluation needs exact potential values");
  if (static_cast<int>(z.size()) != v.dim()) throw std::invalid_argument("point has wrong dimension");
  for (const auto& zj : z)
    if (zj.is_zero()) throw std::domain_error("Floquet matrix undefined at z_j = 0");
  const int n = v.volume();
  Matrix<GaussianRational> m(static_cast<std::size_t>(n), std::vector<GaussianRational>(static_cast<std::size_t>(n)));
  std::vector<GaussianRational> inv(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) inv[j] = GaussianRational(1) / z[j];
  for (int i = 0; i < n; ++i)
    m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = v.exact_values()[static_cast<std::size_t>(i)] - lambda;
  for_each_hop(v.periods(), [&](int row, int col, int axis, int power) {
    auto& e = m[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
    e -= power == 0 ? GaussianRational(1) : (power > 0 ? z[static_cast<std::size_t>(axis)] : inv[static_cast<std::size_t>(axis)]);
  });
  return field_determinant(std::move(m));
}

/// (-1)^Q z_1^{Q/q_1} ... z_d^{Q/q_d} P: for a characteristic polynomial this is a genuine
/// polynomial in z with nonzero constant term in each variable.
inline ExactPoly polynomial_part(const ExactPoly& p, const PeriodSpec& periods) {
  Exponent e{};
  const int vol = periods.volume();
  for (int j = 0; j < periods.dim(); ++j) e[j] = static_cast<std::int16_t>(vol / periods.period(j));
  const ExactPoly r = p.shifted(e);
  return vol % 2 == 0 ? r : -r;
}

struct HighestDegreeReport {
  bool ok = true;
  std::string detail;
};

/// Checks that P contains lambda^Q and z_j^{+-Q/q_j} with coefficients +-1 and nothing beyond
/// those degrees in any single variable.
inline HighestDegreeReport check_highest_degree(const ExactPoly& p, const PeriodSpec& periods) {
  HighestDegreeReport r;
  std::ostringstream os;
  const int d = periods.dim(), vol = periods.volume();
  auto unit_coeff = [&](const Exponent& e, const std::string& what) {
    const GaussianRational c = p.coefficient(e);
    if (!(c == GaussianRational(1) || c == GaussianRational(-1))) {
      r.ok = false;
      os << what << " has coefficient " << c << "; ";
    }
  };
  Exponent el{};
  el[d] = static_cast<std::int16_t>(vol);
  unit_coeff(el, "lambda^" + std::to_string(vol));
  if (p.max_degree(d) > vol) {
    r.ok = false;
    os << "lambda degree " << p.max_degree(d) << " exceeds " << vol << "; ";
  }
  for (int j = 0; j < d; ++j) {
    const int top = vol / periods.period(j);
    for (int s : {+1, -1}) {
      Exponent e{};
      e[j] = static_cast<std::int16_t>(s * top);
      unit_coeff(e, "z" + std::to_string(j + 1) + "^" + std::to_string(s * top));
    }
    if (p.max_degree(j) > top || p.min_degree(j) < -top) {
      r.ok = false;
      os << "z" << (j + 1) << " degree range [" << p.min_degree(j) << "," << p.max_degree(j) << "] exceeds +-" << top
         << "; ";
    }
  }
  r.detail = os.str();
  return r;
}

/// The Fourier-side matrix A + B_V at z, where A is diagonal with
/// A(n,n) = -sum_j (rho_j z_j + 1/(rho_j z_j)), rho_j = exp(2 pi i n_j / q_j), and B(n,n') = Vhat(n - n').
inline Eigen::MatrixXcd fourier_block_matrix(const PeriodicPotential& v, const FourierTable& vhat,
                                             const std::vector<Complex>& z) {
  const auto& p = v.periods();
  const auto& w = p.domain();
  const int n = p.volume();
  Eigen::MatrixXcd m(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      Site diff(static_cast<std::size_t>(p.dim()));
      for (int j = 0; j < p.dim(); ++j)
        diff[static_cast<std::size_t>(j)] = w[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)] -
                                            w[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)];
      m(a, b) = vhat.at(diff);
    }
    Complex diag = 0.0;
    for (int j = 0; j < p.dim(); ++j) {
      const Complex rz = std::polar(1.0, 2.0 * std::numbers::pi * w[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)] /
                                             p.period(j)) *
                         z[static_cast<std::size_t>(j)];
      diag -= rz + 1.0 / rz;
    }
    m(a, a) += diag;
  }
  return m;
}

struct FourierEquivalenceReport {
  bool passed = true;
  int samples = 0;
  double max_eigenvalue_error = 0.0;
  double max_determinant_error = 0.0;  // relative
  std::vector<Complex> worst_point;
};

namespace detail {

inline std::vector<Complex> sorted_eigenvalues(const Eigen::MatrixXcd& m, bool hermitian) {
  std::vector<Complex> ev;
  if (hermitian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    for (int i = 0; i < m.rows(); ++i) ev.emplace_back(es.eigenvalues()(i), 0.0);
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
    for (int i = 0; i < m.rows(); ++i) ev.push_back(es.eigenvalues()(i));
  }
  std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return ev;
}

}  // namespace detail

/// Compares D_V(z^q) with A + B_V at `samples` random points of the unit torus: sorted eigenvalue
/// multisets, and determinants of both shifted by a random spectral parameter.
inline FourierEquivalenceReport verify_fourier_equivalence(const PeriodicPotential& v, int samples, double tol,
                                                           std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  const FourierTable vhat = dft(v);
  const bool hermitian = v.is_real();
  const auto& q = v.periods().periods();
  const int d = v.dim(), n = v.volume();
  std::vector<double> eig_err(static_cast<std::size_t>(samples)), det_err(static_cast<std::size_t>(samples));
  std::vector<std::vector<Complex>> points(static_cast<std::size_t>(samples));
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t s) {
    auto rng = substream(seed, s);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Complex> z(static_cast<std::size_t>(d)), zq(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      z[static_cast<std::size_t>(j)] = std::polar(1.0, 2.0 * std::numbers::pi * unit(rng));
      zq[static_cast<std::size_t>(j)] = std::pow(z[static_cast<std::size_t>(j)], q[static_cast<std::size_t>(j)]);
    }
    const Eigen::MatrixXcd lhs = floquet_matrix_at(v, zq);
    const Eigen::MatrixXcd rhs = fourier_block_matrix(v, vhat, z);
    const auto a = detail::sorted_eigenvalues(lhs, hermitian), b = detail::sorted_eigenvalues(rhs, hermitian);
    double e = 0.0, scale = 1.0;
    for (int i = 0; i < n; ++i) {
      e = std::max(e, std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]));
      scale = std::max(scale, std::abs(a[static_cast<std::size_t>(i)]));
    }
    const Complex lam(4.0 * d * (2.0 * unit(rng) - 1.0), 2.0 * unit(rng) - 1.0);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    const Complex da = (lhs - lam * id).determinant(), db = (rhs - lam * id).determinant();
    det_err[s] = std::abs(da - db) / std::max({1.0, std::abs(da), std::abs(db)});
    eig_err[s] = e / scale;
    points[s] = z;
  });
  FourierEquivalenceReport r;
  r.samples = samples;
  std::size_t worst = 0;
  for (std::size_t s = 0; s < eig_err.size(); ++s) {
    if (std::max(eig_err[s], det_err[s]) > std::max(eig_err[worst], det_err[worst])) worst = s;
    r.max_eigenvalue_error = std::max(r.max_eigenvalue_error, eig_err[s]);
    r.max_determinant_error = std::max(r.max_determinant_error, det_err[s]);
  }
  r.worst_point = points[worst];
  r.passed = r.max_eigenvalue_error <= tol && r.max_determinant_error <= tol;
  return r;
}

}  // namespace fermikit
