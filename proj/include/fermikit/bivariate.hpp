#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fermikit/gaussian_rational.hpp"
#include "fermikit/modular.hpp"

namespace fermikit {

// Dense univariate and bivariate polynomials over a field F (GaussianRational or ModP), used
// by the absolute factor counter. Bivariate polynomials are stored as polynomials in x whose
// coefficients are polynomials in y.

template <class F>
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<F> c) : c_(std::move(c)) { trim(); }
  static UPoly constant(F a) { return UPoly(std::vector<F>{std::move(a)}); }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<F>& coeffs() const { return c_; }
  F operator[](int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[static_cast<std::size_t>(k)] : F(0); }
  const F& lead() const { return c_.back(); }

  friend UPoly operator+(const UPoly& a, const UPoly& b) {
    std::vector<F> r(std::max(a.c_.size(), b.c_.size()), F(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
    return UPoly(std::move(r));
  }
  friend UPoly operator-(const UPoly& a, const UPoly& b) {
    std::vector<F> r(std::max(a.c_.size(), b.c_.size()), F(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] -= b.c_[i];
    return UPoly(std::move(r));
  }
  friend UPoly operator*(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return UPoly();
    std::vector<F> r(a.c_.size() + b.c_.size() - 1, F(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (fermikit::is_zero(a.c_[i])) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    }
    return UPoly(std::move(r));
  }
  friend UPoly operator*(const F& s, const UPoly& a) {
    std::vector<F> r = a.c_;
    for (auto& x : r) x = s * x;
    return UPoly(std::move(r));
  }
  friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const UPoly& a, const UPoly& b) { return !(a == b); }

  /// Quotient and remainder of Euclidean division.
  friend std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
    if (b.is_zero()) throw std::domain_error("univariate division by zero");
    if (a.degree() < b.degree()) return {UPoly(), a};
    std::vector<F> rem = a.c_, quot(a.c_.size() - b.c_.size() + 1, F(0));
    const F inv = F(1) / b.lead();
    for (std::size_t k = quot.size(); k-- > 0;) {
      const F c = rem[k + b.c_.size() - 1] * inv;
      quot[k] = c;
      if (fermikit::is_zero(c)) continue;
      for (std::size_t t = 0; t < b.c_.size(); ++t) rem[k + t] -= c * b.c_[t];
    }
    rem.resize(b.c_.size() - 1);
    return {UPoly(std::move(quot)), UPoly(std::move(rem))};
  }

  UPoly monic() const { return is_zero() ? *this : (F(1) / lead()) * *this; }

  UPoly derivative() const {
    if (c_.size() <= 1) return UPoly();
    std::vector<F> r(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = F(static_cast<long>(i)) * c_[i];
    return UPoly(std::move(r));
  }

 private:
  void trim() {
    while (!c_.empty() && fermikit::is_zero(c_.back())) c_.pop_back();
  }
  std::vector<F> c_;
};

template <class F>
UPoly<F> gcd(UPoly<F> a, UPoly<F> b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

template <class F>
UPoly<F> exact_quotient(const UPoly<F>& a, const UPoly<F>& b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) throw std::logic_error("univariate division is not exact");
  return q;
}

/// Number of distinct roots over the algebraic closure: degree of the squarefree part.
template <class F>
int distinct_root_count(const UPoly<F>& a) {
  if (a.degree() <= 0) return 0;
  return a.degree() - gcd(a, a.derivative()).degree();
}

template <class F>
class BiPoly {
 public:
  using Coeff = UPoly<F>;

  BiPoly() = default;
  explicit BiPoly(std::vector<Coeff> c) : c_(std::move(c)) { trim(); }

  /// From a dense table a[i][j] = coefficient of x^i y^j.
  static BiPoly from_dense(const std::vector<std::vector<F>>& a) {
    std::vector<Coeff> c;
    for (const auto& row : a) c.emplace_back(row);
    return BiPoly(std::move(c));
  }

  bool is_zero() const { return c_.empty(); }
  int deg_x() const { return static_cast<int>(c_.size()) - 1; }
  int deg_y() const {
    int d = -1;
    for (const auto& c : c_) d = std::max(d, c.degree());
    return d;
  }
  int total_degree() const {
    int d = -1;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (!c_[i].is_zero()) d = std::max(d, static_cast<int>(i) + c_[i].degree());
    return d;
  }
  std::size_t term_count() const {
    std::size_t n = 0;
    for (const auto& c : c_)
      for (const auto& x : c.coeffs()) n += fermikit::is_zero(x) ? 0 : 1;
    return n;
  }
  const std::vector<Coeff>& coeffs() const { return c_; }
  const Coeff& lead() const { return c_.back(); }
  F at(int i, int j) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[static_cast<std::size_t>(i)][j] : F(0); }

  friend BiPoly operator+(const BiPoly& a, const BiPoly& b) {
    std::vector<Coeff> r(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i < a.c_.size()) r[i] = r[i] + a.c_[i];
      if (i < b.c_.size()) r[i] = r[i] + b.c_[i];
    }
    return BiPoly(std::move(r));
  }
  friend BiPoly operator-(const BiPoly& a, const BiPoly& b) {
    std::vector<Coeff> r(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i < a.c_.size()) r[i] = r[i] + a.c_[i];
      if (i < b.c_.size()) r[i] = r[i] - b.c_[i];
    }
    return BiPoly(std::move(r));
  }
  friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
    if (a.is_zero() || b.is_zero()) return BiPoly();
    std::vector<Coeff> r(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i].is_zero()) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] = r[i + j] + a.c_[i] * b.c_[j];
    }
    return BiPoly(std::move(r));
  }
  friend BiPoly operator*(const Coeff& s, const BiPoly& a) {
    std::vector<Coeff> r;
    for (const auto& c : a.c_) r.push_back(s * c);
    return BiPoly(std::move(r));
  }
  friend bool operator==(const BiPoly& a, const BiPoly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const BiPoly& a, const BiPoly& b) { return !(a == b); }

  BiPoly dx() const {
    std::vector<Coeff> r;
    for (std::size_t i = 1; i < c_.size(); ++i) r.push_back(F(static_cast<long>(i)) * c_[i]);
    return BiPoly(std::move(r));
  }
  BiPoly dy() const {
    std::vector<Coeff> r;
    for (const auto& c : c_) r.push_back(c.derivative());
    return BiPoly(std::move(r));
  }

  /// gcd of the y-coefficients, monic.
  Coeff content() const {
    Coeff g;
    for (const auto& c : c_) g = gcd(g, c);
    return g;
  }

  BiPoly divide_coefficients(const Coeff& s) const {
    std::vector<Coeff> r;
    for (const auto& c : c_) r.push_back(exact_quotient(c, s));
    return BiPoly(std::move(r));
  }

  BiPoly primitive_part() const { return is_zero() ? *this : divide_coefficients(content()); }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<Coeff> c_;
};

/// lc(b)^(deg a - deg b + 1) a mod b, division in x over F[y].
template <class F>
BiPoly<F> pseudo_remainder(BiPoly<F> a, const BiPoly<F>& b) {
  using Coeff = UPoly<F>;
  if (b.is_zero()) throw std::domain_error("pseudo-division by zero");
  const int db = b.deg_x();
  const Coeff& lb = b.lead();
  while (!a.is_zero() && a.deg_x() >= db) {
    const int shift = a.deg_x() - db;
    const Coeff la = a.lead();
    std::vector<Coeff> t(static_cast<std::size_t>(shift) + 1);
    t[static_cast<std::size_t>(shift)] = la;
    a = lb * a - BiPoly<F>(std::move(t)) * b;
  }
  return a;
}

/// Exact quotient a / b in F[y][x]; throws std::logic_error if b does not divide a.
template <class F>
BiPoly<F> exact_quotient(BiPoly<F> a, const BiPoly<F>& b) {
  using Coeff = UPoly<F>;
  if (b.is_zero()) throw std::domain_error("bivariate division by zero");
  const int db = b.deg_x();
  std::vector<Coeff> q(static_cast<std::size_t>(std::max(0, a.deg_x() - db + 1)));
  while (!a.is_zero()) {
    if (a.deg_x() < db) throw std::logic_error("bivariate division is not exact");
    const int shift = a.deg_x() - db;
    const Coeff c = exact_quotient(a.lead(), b.lead());
    q[static_cast<std::size_t>(shift)] = c;
    std::vector<Coeff> t(static_cast<std::size_t>(shift) + 1);
    t[static_cast<std::size_t>(shift)] = c;
    a = a - BiPoly<F>(std::move(t)) * b;
  }
  return BiPoly<F>(std::move(q));
}

/// gcd in F[y][x] by the primitive polynomial remainder sequence; normalised so the content is
/// monic and the leading y-coefficient of the primitive part is monic.
template <class F>
BiPoly<F> gcd(const BiPoly<F>& a0, const BiPoly<F>& b0) {
  using Coeff = UPoly<F>;
  if (a0.is_zero()) return b0;
  if (b0.is_zero()) return a0;
  const Coeff c = gcd(a0.content(), b0.content());
  BiPoly<F> a = a0.primitive_part(), b = b0.primitive_part();
  if (a.deg_x() < b.deg_x()) std::swap(a, b);
  while (true) {
    if (b.deg_x() == 0) return BiPoly<F>({c});
    BiPoly<F> r = pseudo_remainder(a, b);
    if (r.is_zero()) break;
    a = std::move(b);
    b = r.primitive_part();
  }
  const F lc = b.lead().lead();
  return (F(1) / lc) * c * b;
}

template <class F>
BiPoly<F> operator*(const F& s, const BiPoly<F>& a) {
  return UPoly<F>::constant(s) * a;
}

/// Yun's squarefree decomposition in x of a primitive polynomial: returns a_1, a_2, ... with
/// f = unit * a_1 a_2^2 a_3^3 ..., each a_i squarefree in x and pairwise coprime.
template <class F>
std::vector<BiPoly<F>> squarefree_decomposition(const BiPoly<F>& f) {
  std::vector<BiPoly<F>> out;
  if (f.deg_x() <= 0) return out;
  const BiPoly<F> fx = f.dx();
  const BiPoly<F> g = gcd(f, fx);
  BiPoly<F> c = exact_quotient(f, g);
  BiPoly<F> d = exact_quotient(fx, g) - c.dx();
  while (c.deg_x() > 0) {
    const BiPoly<F> a = gcd(c, d);
    out.push_back(a);
    c = exact_quotient(c, a);
    d = exact_quotient(d, a) - c.dx();
  }
  return out;
}

namespace detail {

/// Rank by Gaussian elimination on a dense row-major matrix.
template <class F>
int matrix_rank(std::vector<F> a, int rows, int cols) {
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int piv = -1;
    for (int r = rank; r < rows; ++r)
      if (!fermikit::is_zero(a[static_cast<std::size_t>(r) * cols + col])) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    if (piv != rank)
      std::swap_ranges(a.begin() + static_cast<long>(piv) * cols, a.begin() + static_cast<long>(piv + 1) * cols,
                       a.begin() + static_cast<long>(rank) * cols);
    const F inv = F(1) / a[static_cast<std::size_t>(rank) * cols + col];
    for (int r = rank + 1; r < rows; ++r) {
      F& lead = a[static_cast<std::size_t>(r) * cols + col];
      if (fermikit::is_zero(lead)) continue;
      const F factor = lead * inv;
      for (int k = col; k < cols; ++k) {
        const F& src = a[static_cast<std::size_t>(rank) * cols + k];
        if (!fermikit::is_zero(src)) a[static_cast<std::size_t>(r) * cols + k] -= factor * src;
      }
    }
    ++rank;
  }
  return rank;
}

/// Specialisation for word-size primes working on raw residues.
template <>
inline int matrix_rank<ModP>(std::vector<ModP> m, int rows, int cols) {
  const std::uint64_t p = ModP::modulus();
  std::vector<std::uint64_t> a(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) a[i] = m[i].value();
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int piv = -1;
    for (int r = rank; r < rows; ++r)
      if (a[static_cast<std::size_t>(r) * cols + col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    if (piv != rank)
      std::swap_ranges(a.begin() + static_cast<long>(piv) * cols, a.begin() + static_cast<long>(piv + 1) * cols,
                       a.begin() + static_cast<long>(rank) * cols);
    std::uint64_t* prow = a.data() + static_cast<std::size_t>(rank) * cols;
    const std::uint64_t inv = ModP::from_raw(prow[col]).inverse().value();
    for (int r = rank + 1; r < rows; ++r) {
      std::uint64_t* row = a.data() + static_cast<std::size_t>(r) * cols;
      if (row[col] == 0) continue;
      const std::uint64_t f = p - row[col] * inv % p;
      for (int k = col; k < cols; ++k)
        if (prow[k] != 0) row[k] = (row[k] + f * prow[k]) % p;
    }
    ++rank;
  }
  return rank;
}

}  // namespace detail

/// Number of absolutely irreducible factors of f, which must satisfy gcd(f, df/dx) = 1 and
/// deg_x f >= 1 (Gao's criterion: dimension of the space of (g, h) with deg g <= (m-1, n),
/// deg h <= (m, n-1) and d/dy (g/f) = d/dx (h/f)). Over F_p this needs p > (2m - 1) n.
template <class F>
int gao_factor_count(const BiPoly<F>& f) {
  const int m = f.deg_x(), n = std::max(0, f.deg_y());
  if (m < 1) throw std::invalid_argument("factor count needs positive degree in x");
  const int ng = m * (n + 1), nh = (m + 1) * n;
  const int cols = ng + nh;
  const int rx = 2 * m, ry = std::max(1, 2 * n);
  const int rows = rx * ry;
  std::vector<F> mat(static_cast<std::size_t>(rows) * cols, F(0));
  std::vector<std::vector<F>> fc(static_cast<std::size_t>(m) + 1, std::vector<F>(static_cast<std::size_t>(n) + 1, F(0)));
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= n; ++j) fc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = f.at(i, j);
  auto add = [&](int a, int b, int col, const F& v) {
    if (fermikit::is_zero(v)) return;
    if (a < 0 || b < 0 || a >= rx || b >= ry) throw std::logic_error("Gao system degree bound violated");
    mat[static_cast<std::size_t>(a * ry + b) * cols + col] += v;
  };
  // g = x^i y^j contributes f * j x^i y^(j-1) - x^i y^j * f_y.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= n; ++j) {
      const int col = i * (n + 1) + j;
      for (int a = 0; a <= m; ++a)
        for (int b = 0; b <= n; ++b) {
          const F& c = fc[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
          if (fermikit::is_zero(c)) continue;
          if (j > 0) add(a + i, b + j - 1, col, F(static_cast<long>(j)) * c);
          if (b > 0) add(a + i, b - 1 + j, col, -(F(static_cast<long>(b)) * c));
        }
    }
  // h = x^i y^j contributes -(f * i x^(i-1) y^j) + x^i y^j * f_x.
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j < n; ++j) {
      const int col = ng + i * n + j;
      for (int a = 0; a <= m; ++a)
        for (int b = 0; b <= n; ++b) {
          const F& c = fc[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
          if (fermikit::is_zero(c)) continue;
          if (i > 0) add(a + i - 1, b + j, col, -(F(static_cast<long>(i)) * c));
          if (a > 0) add(a - 1 + i, b + j, col, F(static_cast<long>(a)) * c);
        }
    }
  return cols - detail::matrix_rank(std::move(mat), rows, cols);
}

struct FactorCount {
  int distinct = 0;
  int with_multiplicity = 0;
};

/// Absolutely irreducible factors of a nonzero, non-monomial bivariate polynomial, counted with
/// and without multiplicity. Factors free of x are the roots of the content in y.
template <class F>
FactorCount count_absolute_factors(const BiPoly<F>& f) {
  if (f.is_zero()) throw std::invalid_argument("factor count of the zero polynomial");
  if (f.term_count() == 1) throw std::invalid_argument("factor count of a monomial");
  FactorCount r;
  const UPoly<F> cont = f.content();
  r.distinct += distinct_root_count(cont);
  r.with_multiplicity += std::max(0, cont.degree());
  const auto parts = squarefree_decomposition(f.divide_coefficients(cont));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].deg_x() < 1) continue;
    const int k = gao_factor_count(parts[i]);
    r.distinct += k;
    r.with_multiplicity += k * static_cast<int>(i + 1);
  }
  return r;
}

}  // namespace fermikit
