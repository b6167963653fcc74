#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>

#include "fermikit/gaussian_rational.hpp"

namespace fermikit {

/// Element of Z/pZ for a word-size prime p < 2^31. The modulus is thread-local state set by
/// ModularScope, in the style of NTL's zz_p; values from different scopes must not be mixed.
class ModP {
 public:
  ModP() = default;
  ModP(std::int64_t v) {  // NOLINT(google-explicit-constructor)
    const auto p = static_cast<std::int64_t>(modulus());
    std::int64_t r = v % p;
    if (r < 0) r += p;
    v_ = static_cast<std::uint64_t>(r);
  }

  static std::uint64_t modulus() { return modulus_ref(); }
  std::uint64_t value() const { return v_; }
  bool is_zero() const { return v_ == 0; }

  ModP operator-() const { return from_raw(v_ == 0 ? 0 : modulus() - v_); }
  ModP& operator+=(ModP o) {
    v_ += o.v_;
    if (v_ >= modulus()) v_ -= modulus();
    return *this;
  }
  ModP& operator-=(ModP o) {
    v_ = v_ >= o.v_ ? v_ - o.v_ : v_ + modulus() - o.v_;
    return *this;
  }
  ModP& operator*=(ModP o) {
    v_ = (v_ * o.v_) % modulus();
    return *this;
  }
  ModP& operator/=(ModP o) { return *this *= o.inverse(); }

  friend ModP operator+(ModP a, ModP b) { return a += b; }
  friend ModP operator-(ModP a, ModP b) { return a -= b; }
  friend ModP operator*(ModP a, ModP b) { return a *= b; }
  friend ModP operator/(ModP a, ModP b) { return a /= b; }
  friend bool operator==(ModP a, ModP b) { return a.v_ == b.v_; }
  friend bool operator!=(ModP a, ModP b) { return a.v_ != b.v_; }

  ModP pow(std::uint64_t e) const {
    ModP base = *this, r = from_raw(1 % modulus());
    while (e) {
      if (e & 1) r *= base;
      base *= base;
      e >>= 1;
    }
    return r;
  }
  ModP inverse() const {
    if (v_ == 0) throw std::domain_error("inverse of zero mod p");
    return pow(modulus() - 2);
  }

  static ModP from_raw(std::uint64_t v) {
    ModP x;
    x.v_ = v;
    return x;
  }

 private:
  friend class ModularScope;
  static std::uint64_t& modulus_ref() {
    thread_local std::uint64_t p = 2147483629ULL;
    return p;
  }
  std::uint64_t v_ = 0;
};

inline bool is_zero(ModP x) { return x.is_zero(); }

/// Sets the thread's modulus for its lifetime and restores the previous one afterwards.
class ModularScope {
 public:
  explicit ModularScope(std::uint64_t prime) : saved_(ModP::modulus_ref()) { ModP::modulus_ref() = prime; }
  ~ModularScope() { ModP::modulus_ref() = saved_; }
  ModularScope(const ModularScope&) = delete;
  ModularScope& operator=(const ModularScope&) = delete;

 private:
  std::uint64_t saved_;
};

/// Deterministic Miller-Rabin; bases {2,3,5,7} are exact below 3.2e9.
inline bool is_prime_u32(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL})
    if (n % p == 0) return n == p;
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  auto powmod = [n](std::uint64_t b, std::uint64_t e) {
    std::uint64_t r = 1;
    b %= n;
    while (e) {
      if (e & 1) r = r * b % n;
      b = b * b % n;
      e >>= 1;
    }
    return r;
  };
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL}) {
    std::uint64_t x = powmod(a, d);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = x * x % n;
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// Random prime p in [2^30, 2^31) with p = 1 mod 4, so that sqrt(-1) exists mod p.
template <class Rng>
std::uint64_t random_gaussian_prime(Rng& rng) {
  std::uniform_int_distribution<std::uint64_t> dist(1ULL << 28, (1ULL << 29) - 1);
  for (;;) {
    const std::uint64_t p = 4 * dist(rng) + 1;
    if (is_prime_u32(p)) return p;
  }
}

/// A square root of -1 in the current field (requires p = 1 mod 4).
inline ModP sqrt_minus_one() {
  const std::uint64_t p = ModP::modulus();
  if (p % 4 != 1) throw std::domain_error("sqrt(-1) needs p = 1 mod 4");
  for (std::uint64_t a = 2;; ++a) {
    const ModP r = ModP(static_cast<std::int64_t>(a)).pow((p - 1) / 4);
    if (r * r == ModP(-1)) return r;
  }
}

/// Image of a Gaussian rational in the current field; nullopt when p divides a denominator.
inline std::optional<ModP> reduce(const GaussianRational& x, ModP i_unit) {
  const std::uint64_t p = ModP::modulus();
  auto part = [p](const mpq_class& q) -> std::optional<ModP> {
    const mpz_class num = q.get_num() % static_cast<unsigned long>(p);
    const mpz_class den = q.get_den() % static_cast<unsigned long>(p);
    if (den == 0) return std::nullopt;
    return ModP(num.get_si()) / ModP(den.get_si());
  };
  auto re = part(x.real());
  if (!re) return std::nullopt;
  if (x.is_real()) return re;
  auto im = part(x.imag());
  if (!im) return std::nullopt;
  return *re + i_unit * *im;
}

}  // namespace fermikit
