#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fermikit/gaussian_rational.hpp"

namespace fermikit {

namespace detail {

// Integer coefficients of the N-th cyclotomic polynomial, lowest degree first.
inline std::vector<long> compute_cyclotomic_polynomial(int n) {
  // x^n - 1 divided by Phi_d for every proper divisor d.
  std::vector<long> num(static_cast<std::size_t>(n) + 1, 0);
  num[0] = -1;
  num[static_cast<std::size_t>(n)] = 1;
  for (int d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    std::vector<long> den = compute_cyclotomic_polynomial(d);
    // Monic long division.
    std::vector<long> quot(num.size() - den.size() + 1, 0);
    for (std::size_t k = quot.size(); k-- > 0;) {
      const long c = num[k + den.size() - 1];
      quot[k] = c;
      for (std::size_t t = 0; t < den.size(); ++t) num[k + t] -= c * den[t];
    }
    num = quot;
  }
  return num;
}

inline const std::vector<long>& cyclotomic_polynomial(int n) {
  static std::mutex mu;
  static std::map<int, std::vector<long>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_cyclotomic_polynomial(n)).first;
  return it->second;
}

}  // namespace detail

/// Element of the cyclotomic field Q(zeta_N), zeta_N = exp(2 pi i / N), stored in the power basis
/// 1, zeta, ..., zeta^(phi(N)-1). A default-constructed value is the zero of every such field.
class Cyclotomic {
 public:
  Cyclotomic() = default;

  /// Embeds a Gaussian rational; a non-real value needs 4 | order.
  Cyclotomic(int order, const GaussianRational& x) : order_(order), c_(degree_of(order)) {
    c_[0] = x.real();
    if (!x.is_real()) {
      if (order % 4 != 0) throw std::domain_error("i is not in Q(zeta_N) for 4 not dividing N");
      *this += Cyclotomic::root(order, order / 4) * Cyclotomic(order, GaussianRational(x.imag()));
    }
  }

  /// zeta_N^k for any integer k.
  static Cyclotomic root(int order, long k) {
    if (order <= 0) throw std::invalid_argument("cyclotomic order must be positive");
    long e = k % order;
    if (e < 0) e += order;
    std::vector<mpq_class> raw(static_cast<std::size_t>(e) + 1, mpq_class(0));
    raw[static_cast<std::size_t>(e)] = 1;
    return Cyclotomic(order, std::move(raw));
  }

  int order() const { return order_; }
  const std::vector<mpq_class>& coefficients() const { return c_; }

  bool is_zero() const {
    for (const auto& x : c_)
      if (sgn(x) != 0) return false;
    return true;
  }

  std::complex<double> to_complex() const {
    std::complex<double> s = 0.0;
    for (std::size_t k = 0; k < c_.size(); ++k)
      if (sgn(c_[k]) != 0) s += c_[k].get_d() * std::polar(1.0, 2.0 * std::numbers::pi * double(k) / order_);
    return s;
  }

  /// The value as a Gaussian rational, when it lies in Q(i).
  std::optional<GaussianRational> to_gaussian() const {
    if (is_zero()) return GaussianRational();
    bool rational = true;
    for (std::size_t k = 1; k < c_.size(); ++k)
      if (sgn(c_[k]) != 0) rational = false;
    if (rational) return GaussianRational(c_[0]);
    if (order_ % 4 != 0) return std::nullopt;
    const Cyclotomic unit_i = root(order_, order_ / 4);
    std::size_t pos = 0;
    for (std::size_t k = 1; k < unit_i.c_.size(); ++k)
      if (sgn(unit_i.c_[k]) != 0) {
        pos = k;
        break;
      }
    mpq_class b = c_[pos] / unit_i.c_[pos];
    mpq_class a = c_[0] - b * unit_i.c_[0];
    GaussianRational candidate(a, b);
    if (Cyclotomic(order_, candidate) != *this) return std::nullopt;
    return candidate;
  }

  Cyclotomic operator-() const {
    Cyclotomic r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }

  Cyclotomic& operator+=(const Cyclotomic& o) {
    adopt(o);
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  Cyclotomic& operator-=(const Cyclotomic& o) {
    adopt(o);
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Cyclotomic& operator*=(const Cyclotomic& o) {
    if (order_ == 0 || o.order_ == 0) {
      *this = order_ == 0 ? Cyclotomic() : Cyclotomic(order_, std::vector<mpq_class>{});
      return *this;
    }
    adopt(o);
    std::vector<mpq_class> raw(c_.size() + o.c_.size(), mpq_class(0));
    for (std::size_t a = 0; a < c_.size(); ++a) {
      if (sgn(c_[a]) == 0) continue;
      for (std::size_t b = 0; b < o.c_.size(); ++b)
        if (sgn(o.c_[b]) != 0) raw[a + b] += c_[a] * o.c_[b];
    }
    *this = Cyclotomic(order_, std::move(raw));
    return *this;
  }

  friend Cyclotomic operator+(Cyclotomic a, const Cyclotomic& b) { return a += b; }
  friend Cyclotomic operator-(Cyclotomic a, const Cyclotomic& b) { return a -= b; }
  friend Cyclotomic operator*(Cyclotomic a, const Cyclotomic& b) { return a *= b; }

  friend bool operator==(const Cyclotomic& a, const Cyclotomic& b) {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    return a.order_ == b.order_ && a.c_ == b.c_;
  }
  friend bool operator!=(const Cyclotomic& a, const Cyclotomic& b) { return !(a == b); }

  std::string to_string() const {
    if (is_zero()) return "0";
    std::string s;
    for (std::size_t k = 0; k < c_.size(); ++k) {
      if (sgn(c_[k]) == 0) continue;
      if (!s.empty()) s += " + ";
      s += "(" + c_[k].get_str() + ")*w" + std::to_string(order_) + "^" + std::to_string(k);
    }
    return s;
  }

 private:
  static std::size_t degree_of(int order) {
    return detail::cyclotomic_polynomial(order).size() - 1;
  }

  // Reduces a raw power-basis vector modulo Phi_N.
  Cyclotomic(int order, std::vector<mpq_class> raw) : order_(order) {
    const auto& phi = detail::cyclotomic_polynomial(order);
    const std::size_t deg = phi.size() - 1;
    for (std::size_t k = raw.size(); k-- > deg;) {
      if (sgn(raw[k]) == 0) continue;
      const mpq_class c = raw[k];
      for (std::size_t t = 0; t <= deg; ++t)
        if (phi[t] != 0) raw[k - deg + t] -= c * phi[t];
    }
    raw.resize(deg, mpq_class(0));
    c_ = std::move(raw);
  }

  void adopt(const Cyclotomic& o) {
    if (o.order_ == 0) return;
    if (order_ == 0) {
      order_ = o.order_;
      c_.assign(degree_of(order_), mpq_class(0));
      return;
    }
    if (order_ != o.order_) throw std::logic_error("mixing cyclotomic fields of different orders");
  }

  int order_ = 0;
  std::vector<mpq_class> c_;
};

inline bool is_zero(const Cyclotomic& x) { return x.is_zero(); }

}  // namespace fermikit
