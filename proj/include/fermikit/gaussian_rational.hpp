#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fermikit {

/// Parses "p", "-p" or "p/q" into a canonical rational. Throws on malformed input or q = 0.
inline mpq_class parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational");
  const auto slash = s.find('/');
  auto is_int = [](const std::string& t) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!num.empty() && num[0] == '+') num.erase(0, 1);
  if (!is_int(num) || !is_int(den)) throw std::invalid_argument("malformed rational '" + s + "'");
  mpz_class n(num, 10), d(den, 10);
  if (d == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
  mpq_class q(n, d);
  q.canonicalize();
  return q;
}

/// Exact complex number a + b i with rational a and b.
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(int re) : re_(re) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(long re) : re_(re) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(const mpq_class& re) : re_(re) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {}

  static GaussianRational i() { return {mpq_class(0), mpq_class(1)}; }
  static GaussianRational from_ratio(long p, long q) {
    mpq_class r(p, q);
    r.canonicalize();
    return GaussianRational(r);
  }

  const mpq_class& real() const { return re_; }
  const mpq_class& imag() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

  GaussianRational conj() const { return {re_, mpq_class(-im_)}; }
  mpq_class norm() const { return mpq_class(re_ * re_ + im_ * im_); }

  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  /// "(re,im)" with each part written as an integer or p/q.
  std::string to_string() const { return "(" + re_.get_str() + "," + im_.get_str() + ")"; }

  GaussianRational operator-() const { return {mpq_class(-re_), mpq_class(-im_)}; }

  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    if (sgn(o.im_) != 0) im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    if (sgn(o.im_) != 0) im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
      re_ *= o.re_;
      return *this;
    }
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class m = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(m);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero Gaussian rational");
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
      re_ /= o.re_;
      return *this;
    }
    const mpq_class n = o.norm();
    mpq_class r = (re_ * o.re_ + im_ * o.im_) / n;
    mpq_class m = (im_ * o.re_ - re_ * o.im_) / n;
    re_ = std::move(r);
    im_ = std::move(m);
    return *this;
  }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const GaussianRational& x) { return os << x.to_string(); }

  std::size_t hash() const {
    std::size_t h = std::hash<std::string>{}(re_.get_str());
    return h ^ (std::hash<std::string>{}(im_.get_str()) * 0x9e3779b97f4a7c15ULL);
  }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

inline bool is_zero(const GaussianRational& x) { return x.is_zero(); }

/// Parses "(re,im)" as emitted by to_string(), or a bare rational.
inline GaussianRational parse_gaussian(std::string_view text) {
  std::string s(text);
  if (!s.empty() && s.front() == '(') {
    if (s.back() != ')') throw std::invalid_argument("unbalanced parentheses in '" + s + "'");
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("missing ',' in '" + s + "'");
    return {parse_rational(s.substr(1, comma - 1)), parse_rational(s.substr(comma + 1, s.size() - comma - 2))};
  }
  return GaussianRational(parse_rational(s));
}

}  // namespace fermikit
