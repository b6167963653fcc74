#pragma once

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fermikit/laurent.hpp"

namespace fermikit {

template <class T>
using Matrix = std::vector<std::vector<T>>;

namespace detail {

template <class T>
std::size_t check_square(const Matrix<T>& m) {
  const std::size_t n = m.size();
  if (n == 0) throw std::invalid_argument("determinant of an empty matrix");
  for (const auto& row : m)
    if (row.size() != n) throw std::invalid_argument("matrix is not square");
  return n;
}

}  // namespace detail

/// Determinant of a matrix of Laurent polynomials by fraction-free (Bareiss) elimination.
///
/// Each row is first multiplied by the monomial that clears its negative z-powers, so the
/// elimination runs over an honest polynomial ring where every Bareiss division is exact. The
/// accumulated monomial is divided out at the end.
template <class C>
LaurentPoly<C> bareiss_determinant(Matrix<LaurentPoly<C>> m) {
  const std::size_t n = detail::check_square(m);
  const int dim = m[0][0].dim();
  Exponent cleared{};
  for (auto& row : m) {
    Exponent lift{};
    for (int j = 0; j < dim; ++j) {
      int low = 0;
      for (const auto& e : row)
        if (!e.is_zero()) low = std::min(low, e.min_degree(j));
      lift[j] = static_cast<std::int16_t>(-low);
    }
    if (lift == Exponent{}) continue;
    for (auto& e : row) e = e.shifted(lift);
    cleared = exponent_add(cleared, lift);
  }

  bool negate = false;
  LaurentPoly<C> prev = LaurentPoly<C>::constant(dim, C(1));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    // Pivot: the nonzero entry with the fewest terms keeps intermediate growth down.
    std::size_t piv = n;
    for (std::size_t i = k; i < n; ++i)
      if (!m[i][k].is_zero() && (piv == n || m[i][k].size() < m[piv][k].size())) piv = i;
    if (piv == n) return LaurentPoly<C>(dim);
    if (piv != k) {
      std::swap(m[piv], m[k]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        LaurentPoly<C> num = m[k][k] * m[i][j];
        if (!m[i][k].is_zero() && !m[k][j].is_zero()) num -= m[i][k] * m[k][j];
        m[i][j] = k == 0 ? std::move(num) : exact_divide(num, prev);
      }
      m[i][k] = LaurentPoly<C>(dim);
    }
    prev = m[k][k];
  }
  LaurentPoly<C> det = std::move(m[n - 1][n - 1]);
  if (negate) det = -det;
  Exponent back{};
  for (int j = 0; j < dim; ++j) back[j] = static_cast<std::int16_t>(-cleared[j]);
  return det.shifted(back);
}

/// Determinant by Laplace expansion along rows with memoisation on the remaining column set.
/// Exponential in n; meant as an independent cross-check for small matrices (n <= 20).
template <class T>
T cofactor_determinant(const Matrix<T>& m) {
  const std::size_t n = detail::check_square(m);
  if (n > 20) throw std::invalid_argument("cofactor expansion limited to n <= 20");
  const T zero = m[0][0] - m[0][0];
  std::unordered_map<std::uint32_t, T> memo;
  auto rec = [&](auto&& self, std::size_t row, std::uint32_t cols) -> T {
    if (row == n - 1) {
      for (std::size_t c = 0; c < n; ++c)
        if (cols & (1u << c)) return m[row][c];
    }
    if (auto it = memo.find(cols); it != memo.end()) return it->second;
    T acc = zero;
    int pos = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (!(cols & (1u << c))) continue;
      if (!is_zero(m[row][c])) {
        T minor = self(self, row + 1, cols & ~(1u << c));
        if (pos % 2 == 0) {
          acc += m[row][c] * minor;
        } else {
          acc -= m[row][c] * minor;
        }
      }
      ++pos;
    }
    memo.emplace(cols, acc);
    return acc;
  };
  return rec(rec, 0, n == 32 ? ~0u : ((1u << n) - 1));
}

template <class C>
bool is_zero(const LaurentPoly<C>& p) {
  return p.is_zero();
}

/// Determinant over a field by Gaussian elimination with nonzero pivoting.
template <class F>
F field_determinant(Matrix<F> a) {
  const std::size_t n = detail::check_square(a);
  F det(1);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && is_zero(a[piv][k])) ++piv;
    if (piv == n) return F(0);
    if (piv != k) {
      std::swap(a[piv], a[k]);
      det = -det;
    }
    det *= a[k][k];
    const F inv = F(1) / a[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      if (is_zero(a[i][k])) continue;
      const F f = a[i][k] * inv;
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return det;
}

}  // namespace fermikit
