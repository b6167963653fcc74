#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fermikit/cyclotomic.hpp"
#include "fermikit/gaussian_rational.hpp"

namespace fermikit {

/// Maximum number of variables (z_1..z_d plus the lambda slot).
inline constexpr int kMaxVars = 8;

/// Exponent vector; slots past the last variable stay zero.
using Exponent = std::array<std::int16_t, kMaxVars>;

struct ExponentHash {
  std::size_t operator()(const Exponent& e) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto x : e) {
      h ^= static_cast<std::uint16_t>(x);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Graded lexicographic order: total degree first, then lexicographic with z_1 most significant
/// and lambda last. Compatible with multiplication of monomials.
inline bool graded_less(const Exponent& a, const Exponent& b) {
  int sa = 0, sb = 0;
  for (int k = 0; k < kMaxVars; ++k) {
    sa += a[k];
    sb += b[k];
  }
  if (sa != sb) return sa < sb;
  return a < b;
}

struct GradedLess {
  bool operator()(const Exponent& a, const Exponent& b) const { return graded_less(a, b); }
};

inline Exponent exponent_add(const Exponent& a, const Exponent& b) {
  Exponent r{};
  for (int k = 0; k < kMaxVars; ++k) r[k] = static_cast<std::int16_t>(a[k] + b[k]);
  return r;
}
inline Exponent exponent_sub(const Exponent& a, const Exponent& b) {
  Exponent r{};
  for (int k = 0; k < kMaxVars; ++k) r[k] = static_cast<std::int16_t>(a[k] - b[k]);
  return r;
}

/// Sparse Laurent polynomial in z_1..z_d (any integer exponents) and lambda (exponent >= 0),
/// with coefficients in a commutative ring C. Terms are kept sorted in graded order with no
/// zero coefficients, so equal polynomials compare equal term by term.
template <class C>
class LaurentPoly {
 public:
  struct Term {
    Exponent exp;
    C coeff;
    friend bool operator==(const Term& a, const Term& b) { return a.exp == b.exp && a.coeff == b.coeff; }
  };

  explicit LaurentPoly(int dim = 1) : dim_(dim) {
    if (dim < 1 || dim >= kMaxVars) throw std::invalid_argument("Laurent polynomial dimension out of range");
  }

  static LaurentPoly constant(int dim, C c) {
    LaurentPoly p(dim);
    if (!fermikit::is_zero(c)) p.terms_.push_back({Exponent{}, std::move(c)});
    return p;
  }
  static LaurentPoly monomial(int dim, const Exponent& e, C c) {
    LaurentPoly p(dim);
    p.check_exponent(e);
    if (!fermikit::is_zero(c)) p.terms_.push_back({e, std::move(c)});
    return p;
  }
  /// c * z_j^power (j is 0-based).
  static LaurentPoly z(int dim, int j, int power = 1, C c = C(1)) {
    Exponent e{};
    e[j] = static_cast<std::int16_t>(power);
    return monomial(dim, e, std::move(c));
  }
  static LaurentPoly lambda(int dim, int power = 1, C c = C(1)) {
    Exponent e{};
    e[dim] = static_cast<std::int16_t>(power);
    return monomial(dim, e, std::move(c));
  }
  /// Builds from arbitrary (exponent, coefficient) pairs; duplicates are summed.
  static LaurentPoly from_terms(int dim, std::vector<Term> raw) {
    LaurentPoly p(dim);
    std::sort(raw.begin(), raw.end(), [](const Term& a, const Term& b) { return graded_less(a.exp, b.exp); });
    for (auto& t : raw) {
      p.check_exponent(t.exp);
      if (!p.terms_.empty() && p.terms_.back().exp == t.exp) {
        p.terms_.back().coeff += t.coeff;
      } else {
        if (!p.terms_.empty() && fermikit::is_zero(p.terms_.back().coeff)) p.terms_.pop_back();
        p.terms_.push_back(std::move(t));
      }
    }
    if (!p.terms_.empty() && fermikit::is_zero(p.terms_.back().coeff)) p.terms_.pop_back();
    return p;
  }

  int dim() const { return dim_; }
  int nvars() const { return dim_ + 1; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  /// Terms in ascending graded order.
  const std::vector<Term>& terms() const { return terms_; }
  const Term& leading_term() const { return terms_.back(); }
  const Term& trailing_term() const { return terms_.front(); }

  C coefficient(const Exponent& e) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                               [](const Term& t, const Exponent& x) { return graded_less(t.exp, x); });
    if (it != terms_.end() && it->exp == e) return it->coeff;
    return C{};
  }

  bool is_monomial() const { return terms_.size() == 1; }

  int max_degree(int var) const {
    int m = std::numeric_limits<int>::min();
    for (const auto& t : terms_) m = std::max(m, int(t.exp[var]));
    return m;
  }
  int min_degree(int var) const {
    int m = std::numeric_limits<int>::max();
    for (const auto& t : terms_) m = std::min(m, int(t.exp[var]));
    return m;
  }
  int lambda_degree() const { return is_zero() ? 0 : max_degree(dim_); }

  LaurentPoly operator-() const {
    LaurentPoly r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }

  friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) { return merge(a, b, false); }
  friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return merge(a, b, true); }
  LaurentPoly& operator+=(const LaurentPoly& b) { return *this = merge(*this, b, false); }
  LaurentPoly& operator-=(const LaurentPoly& b) { return *this = merge(*this, b, true); }

  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    check_same(a, b);
    LaurentPoly r(a.dim_);
    if (a.is_zero() || b.is_zero()) return r;
    if (a.size() == 1 || b.size() == 1) {
      const LaurentPoly& mono = a.size() == 1 ? a : b;
      const LaurentPoly& other = a.size() == 1 ? b : a;
      const auto& m = mono.terms_.front();
      r.terms_.reserve(other.size());
      for (const auto& t : other.terms_) {
        C c = t.coeff * m.coeff;
        if (!fermikit::is_zero(c)) r.terms_.push_back({exponent_add(t.exp, m.exp), std::move(c)});
      }
      return r;  // shifting by a monomial preserves the order
    }
    std::unordered_map<Exponent, C, ExponentHash> acc;
    acc.reserve(a.size() * b.size());
    for (const auto& s : a.terms_)
      for (const auto& t : b.terms_) {
        auto [it, inserted] = acc.try_emplace(exponent_add(s.exp, t.exp));
        if (inserted) {
          it->second = s.coeff * t.coeff;
        } else {
          it->second += s.coeff * t.coeff;
        }
      }
    r.terms_.reserve(acc.size());
    for (auto& [e, c] : acc)
      if (!fermikit::is_zero(c)) r.terms_.push_back({e, std::move(c)});
    std::sort(r.terms_.begin(), r.terms_.end(), [](const Term& x, const Term& y) { return graded_less(x.exp, y.exp); });
    return r;
  }
  LaurentPoly& operator*=(const LaurentPoly& b) { return *this = *this * b; }

  friend LaurentPoly operator*(const C& c, const LaurentPoly& a) {
    LaurentPoly r(a.dim_);
    if (fermikit::is_zero(c)) return r;
    r.terms_.reserve(a.size());
    for (const auto& t : a.terms_) {
      C x = c * t.coeff;
      if (!fermikit::is_zero(x)) r.terms_.push_back({t.exp, std::move(x)});
    }
    return r;
  }

  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) { return a.dim_ == b.dim_ && a.terms_ == b.terms_; }
  friend bool operator!=(const LaurentPoly& a, const LaurentPoly& b) { return !(a == b); }

  /// Multiplies by the monomial z^e (lambda slot of e must be >= -min lambda degree).
  LaurentPoly shifted(const Exponent& e) const {
    LaurentPoly r = *this;
    for (auto& t : r.terms_) t.exp = exponent_add(t.exp, e);
    for (const auto& t : r.terms_) r.check_exponent(t.exp);
    return r;
  }

  template <class D, class F>
  LaurentPoly<D> map_coefficients(F&& f) const {
    std::vector<typename LaurentPoly<D>::Term> raw;
    raw.reserve(terms_.size());
    for (const auto& t : terms_) raw.push_back({t.exp, f(t.coeff)});
    return LaurentPoly<D>::from_terms(dim_, std::move(raw));
  }

  /// Substitutes lambda = value; the result has no lambda dependence.
  LaurentPoly specialize_lambda(const C& value) const {
    std::vector<Term> raw;
    const int top = lambda_degree();
    std::vector<C> pw(static_cast<std::size_t>(top) + 1);
    pw[0] = C(1);
    for (int k = 1; k <= top; ++k) pw[static_cast<std::size_t>(k)] = pw[static_cast<std::size_t>(k) - 1] * value;
    for (const auto& t : terms_) {
      Exponent e = t.exp;
      const int k = e[dim_];
      e[dim_] = 0;
      raw.push_back({e, t.coeff * pw[static_cast<std::size_t>(k)]});
    }
    return from_terms(dim_, std::move(raw));
  }

 private:
  template <class>
  friend class LaurentPoly;

  void check_exponent(const Exponent& e) const {
    if (e[dim_] < 0) throw std::invalid_argument("lambda exponent must be non-negative");
    for (int k = dim_ + 1; k < kMaxVars; ++k)
      if (e[k] != 0) throw std::invalid_argument("exponent uses a variable past lambda");
  }

  static void check_same(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("Laurent polynomials have different variable counts");
  }

  static LaurentPoly merge(const LaurentPoly& a, const LaurentPoly& b, bool subtract) {
    check_same(a, b);
    LaurentPoly r(a.dim_);
    r.terms_.reserve(a.size() + b.size());
    auto i = a.terms_.begin(), j = b.terms_.begin();
    while (i != a.terms_.end() || j != b.terms_.end()) {
      if (j == b.terms_.end() || (i != a.terms_.end() && graded_less(i->exp, j->exp))) {
        r.terms_.push_back(*i++);
      } else if (i == a.terms_.end() || graded_less(j->exp, i->exp)) {
        r.terms_.push_back(subtract ? Term{j->exp, -j->coeff} : *j);
        ++j;
      } else {
        C c = i->coeff;
        if (subtract) {
          c -= j->coeff;
        } else {
          c += j->coeff;
        }
        if (!fermikit::is_zero(c)) r.terms_.push_back({i->exp, std::move(c)});
        ++i;
        ++j;
      }
    }
    return r;
  }

  int dim_;
  std::vector<Term> terms_;
};

using ExactPoly = LaurentPoly<GaussianRational>;

/// f / g when g divides f exactly; throws std::domain_error otherwise. Coefficients must form a
/// field. Works directly with negative exponents since monomials are units.
template <class C>
LaurentPoly<C> exact_divide(const LaurentPoly<C>& f, const LaurentPoly<C>& g) {
  if (g.is_zero()) throw std::domain_error("division by the zero polynomial");
  if (f.dim() != g.dim()) throw std::invalid_argument("Laurent polynomials have different variable counts");
  using Term = typename LaurentPoly<C>::Term;
  if (f.is_zero()) return LaurentPoly<C>(f.dim());
  if (g.is_monomial()) {
    const auto& m = g.leading_term();
    std::vector<Term> raw;
    raw.reserve(f.size());
    for (const auto& t : f.terms()) raw.push_back({exponent_sub(t.exp, m.exp), t.coeff / m.coeff});
    return LaurentPoly<C>::from_terms(f.dim(), std::move(raw));
  }
  std::map<Exponent, C, GradedLess> rem;
  for (const auto& t : f.terms()) rem.emplace(t.exp, t.coeff);
  const Term& lg = g.leading_term();
  const Exponent floor = exponent_sub(f.trailing_term().exp, g.trailing_term().exp);
  std::vector<Term> quot;
  while (!rem.empty()) {
    auto top = std::prev(rem.end());
    const Exponent qe = exponent_sub(top->first, lg.exp);
    if (graded_less(qe, floor)) throw std::domain_error("polynomial division is not exact");
    const C qc = top->second / lg.coeff;
    for (const auto& t : g.terms()) {
      const Exponent e = exponent_add(t.exp, qe);
      auto [it, inserted] = rem.try_emplace(e);
      if (inserted) {
        it->second = -(t.coeff * qc);
      } else {
        it->second -= t.coeff * qc;
      }
      if (fermikit::is_zero(it->second)) rem.erase(it);
    }
    quot.push_back({qe, qc});
  }
  return LaurentPoly<C>::from_terms(f.dim(), std::move(quot));
}

// ---------------------------------------------------------------------------
// Evaluation

/// f(z, lambda) in floating point. Every z_j must be nonzero where negative powers occur.
template <class C, class ToComplex>
std::complex<double> eval_with(const LaurentPoly<C>& f, const std::vector<std::complex<double>>& z,
                               std::complex<double> lambda, ToComplex&& to_c) {
  if (static_cast<int>(z.size()) != f.dim()) throw std::invalid_argument("evaluation point has wrong dimension");
  for (const auto& t : f.terms())
    for (int j = 0; j < f.dim(); ++j)
      if (t.exp[j] < 0 && z[static_cast<std::size_t>(j)] == 0.0)
        throw std::domain_error("zero coordinate with a negative exponent");
  std::complex<double> s = 0.0;
  for (const auto& t : f.terms()) {
    std::complex<double> m = to_c(t.coeff);
    for (int j = 0; j < f.dim(); ++j)
      if (t.exp[j] != 0) m *= std::pow(z[static_cast<std::size_t>(j)], int(t.exp[j]));
    if (t.exp[f.dim()] != 0) m *= std::pow(lambda, int(t.exp[f.dim()]));
    s += m;
  }
  return s;
}

inline std::complex<double> eval(const ExactPoly& f, const std::vector<std::complex<double>>& z,
                                 std::complex<double> lambda = 0.0) {
  return eval_with(f, z, lambda, [](const GaussianRational& c) { return c.to_complex(); });
}

inline std::complex<double> eval(const LaurentPoly<Cyclotomic>& f, const std::vector<std::complex<double>>& z,
                                 std::complex<double> lambda = 0.0) {
  return eval_with(f, z, lambda, [](const Cyclotomic& c) { return c.to_complex(); });
}

/// Exact value at a Gaussian-rational point.
inline GaussianRational eval_exact(const ExactPoly& f, const std::vector<GaussianRational>& z,
                                   const GaussianRational& lambda = GaussianRational()) {
  if (static_cast<int>(z.size()) != f.dim()) throw std::invalid_argument("evaluation point has wrong dimension");
  auto power = [](const GaussianRational& x, int k) {
    GaussianRational base = k < 0 ? GaussianRational(1) / x : x;
    GaussianRational r(1);
    for (int e = std::abs(k); e > 0; e >>= 1) {
      if (e & 1) r *= base;
      base *= base;
    }
    return r;
  };
  GaussianRational s;
  for (const auto& t : f.terms()) {
    GaussianRational m = t.coeff;
    for (int j = 0; j < f.dim(); ++j) {
      if (t.exp[j] == 0) continue;
      if (t.exp[j] < 0 && z[static_cast<std::size_t>(j)].is_zero())
        throw std::domain_error("zero coordinate with a negative exponent");
      m *= power(z[static_cast<std::size_t>(j)], t.exp[j]);
    }
    if (t.exp[f.dim()] != 0) m *= power(lambda, t.exp[f.dim()]);
    s += m;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Structural operations

/// z_j -> z_j^{q_j}; lambda untouched.
template <class C>
LaurentPoly<C> substitute_powers(const LaurentPoly<C>& f, const std::vector<int>& q) {
  if (static_cast<int>(q.size()) != f.dim()) throw std::invalid_argument("period vector has wrong dimension");
  std::vector<typename LaurentPoly<C>::Term> raw;
  raw.reserve(f.size());
  for (const auto& t : f.terms()) {
    Exponent e = t.exp;
    for (int j = 0; j < f.dim(); ++j) e[j] = static_cast<std::int16_t>(e[j] * q[static_cast<std::size_t>(j)]);
    raw.push_back({e, t.coeff});
  }
  return LaurentPoly<C>::from_terms(f.dim(), std::move(raw));
}

/// Inverse of substitute_powers; throws std::logic_error if some exponent is not divisible by q_j.
template <class C>
LaurentPoly<C> collapse_powers(const LaurentPoly<C>& f, const std::vector<int>& q) {
  std::vector<typename LaurentPoly<C>::Term> raw;
  raw.reserve(f.size());
  for (const auto& t : f.terms()) {
    Exponent e = t.exp;
    for (int j = 0; j < f.dim(); ++j) {
      const int qj = q[static_cast<std::size_t>(j)];
      if (e[j] % qj != 0) throw std::logic_error("exponent not divisible by its period; polynomial is not mu-invariant");
      e[j] = static_cast<std::int16_t>(e[j] / qj);
    }
    raw.push_back({e, t.coeff});
  }
  return LaurentPoly<C>::from_terms(f.dim(), std::move(raw));
}

inline int cyclotomic_order_for(const std::vector<int>& q) {
  int n = 4;
  for (int qj : q) n = std::lcm(n, qj);
  return n;
}

inline Cyclotomic to_cyclotomic(int order, const GaussianRational& c) { return Cyclotomic(order, c); }
inline Cyclotomic to_cyclotomic(int order, const Cyclotomic& c) {
  if (c.is_zero() || c.order() == order) return c;
  throw std::logic_error("cyclotomic coefficient has a different order");
}

/// Embeds coefficients into Q(zeta_N).
template <class C>
LaurentPoly<Cyclotomic> to_cyclotomic_poly(const LaurentPoly<C>& f, int order) {
  return f.template map_coefficients<Cyclotomic>([order](const C& c) { return to_cyclotomic(order, c); });
}

/// Symbolic group action f(rho . z) for rho^j = exp(2 pi i shifts_j / q_j); coefficients are
/// tracked exactly in Q(zeta_N) with N = lcm(4, q_1, ..., q_d).
template <class C>
LaurentPoly<Cyclotomic> group_act(const LaurentPoly<C>& f, const std::vector<int>& shifts, const std::vector<int>& q) {
  if (static_cast<int>(q.size()) != f.dim() || shifts.size() != q.size())
    throw std::invalid_argument("group element has wrong dimension");
  const int order = cyclotomic_order_for(q);
  std::vector<LaurentPoly<Cyclotomic>::Term> raw;
  raw.reserve(f.size());
  for (const auto& t : f.terms()) {
    long k = 0;
    for (int j = 0; j < f.dim(); ++j) {
      const int qj = q[static_cast<std::size_t>(j)];
      k += long(t.exp[j]) * shifts[static_cast<std::size_t>(j)] * (order / qj);
    }
    raw.push_back({t.exp, Cyclotomic::root(order, k) * to_cyclotomic(order, t.coeff)});
  }
  return LaurentPoly<Cyclotomic>::from_terms(f.dim(), std::move(raw));
}

/// f(rho . z, lambda) in floating point for an explicit tuple of roots of unity.
inline std::complex<double> group_act_eval(const ExactPoly& f, const std::vector<std::complex<double>>& rho,
                                           const std::vector<int>& q, const std::vector<std::complex<double>>& z,
                                           std::complex<double> lambda) {
  if (rho.size() != q.size() || z.size() != q.size()) throw std::invalid_argument("group element has wrong dimension");
  std::vector<std::complex<double>> w(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (std::abs(std::pow(rho[j], q[j]) - 1.0) > 1e-12 || std::abs(std::abs(rho[j]) - 1.0) > 1e-12)
      throw std::invalid_argument("phase is not a q_j-th root of unity");
    w[j] = rho[j] * z[j];
  }
  return eval(f, w, lambda);
}

/// Checks f(rho . z) == f for the generators of mu_{q_1} x ... x mu_{q_d}, symbolically.
template <class C>
bool is_mu_invariant(const LaurentPoly<C>& f, const std::vector<int>& q) {
  const int order = cyclotomic_order_for(q);
  const auto embedded = to_cyclotomic_poly(f, order);
  for (std::size_t j = 0; j < q.size(); ++j) {
    std::vector<int> shifts(q.size(), 0);
    shifts[j] = 1;
    if (group_act(f, shifts, q) != embedded) return false;
  }
  return true;
}

/// Initial form for the grading deg(z^a) = sum_j signs_j a_j; lambda exponents are not graded.
template <class C>
LaurentPoly<C> lowest_component(const LaurentPoly<C>& f, const std::vector<int>& signs) {
  if (f.is_zero()) throw std::invalid_argument("lowest component of the zero polynomial");
  if (static_cast<int>(signs.size()) != f.dim()) throw std::invalid_argument("sign vector has wrong dimension");
  auto grade = [&](const Exponent& e) {
    int g = 0;
    for (int j = 0; j < f.dim(); ++j) g += signs[static_cast<std::size_t>(j)] * e[j];
    return g;
  };
  int low = std::numeric_limits<int>::max();
  for (const auto& t : f.terms()) low = std::min(low, grade(t.exp));
  std::vector<typename LaurentPoly<C>::Term> raw;
  for (const auto& t : f.terms())
    if (grade(t.exp) == low) raw.push_back(t);
  return LaurentPoly<C>::from_terms(f.dim(), std::move(raw));
}

/// f = unit * body with unit = c z^a a monomial and body of minimal degree 0 in every z_j whose
/// graded-leading coefficient is 1 (so in particular of positive real part).
struct UnitNormalForm {
  Exponent unit_exponent{};
  GaussianRational unit_coefficient{1};
  ExactPoly body;

  ExactPoly unit(int dim) const { return ExactPoly::monomial(dim, unit_exponent, unit_coefficient); }
};

inline UnitNormalForm unit_normalize(const ExactPoly& f) {
  if (f.is_zero()) throw std::invalid_argument("unit normal form of the zero polynomial");
  UnitNormalForm u;
  for (int j = 0; j < f.dim(); ++j) u.unit_exponent[j] = static_cast<std::int16_t>(f.min_degree(j));
  Exponent neg{};
  for (int j = 0; j < f.dim(); ++j) neg[j] = static_cast<std::int16_t>(-u.unit_exponent[j]);
  u.unit_coefficient = f.leading_term().coeff;
  u.body = (GaussianRational(1) / u.unit_coefficient) * f.shifted(neg);
  return u;
}

/// Associates in the Laurent ring: equal up to a monomial unit c z^a.
inline bool are_associates(const ExactPoly& f, const ExactPoly& g) {
  if (f.is_zero() || g.is_zero()) return f.is_zero() && g.is_zero();
  return unit_normalize(f).body == unit_normalize(g).body;
}

// ---------------------------------------------------------------------------
// Canonical text format: one term per line, highest graded term first,
//   (re,im) * z1^a1 * ... * zd^ad * l^e
// The zero polynomial is the single line "0".

inline std::string to_text(const ExactPoly& f) {
  if (f.is_zero()) return "0\n";
  std::ostringstream os;
  for (auto it = f.terms().rbegin(); it != f.terms().rend(); ++it) {
    os << it->coeff.to_string();
    for (int j = 0; j < f.dim(); ++j) os << " * z" << (j + 1) << "^" << it->exp[j];
    os << " * l^" << it->exp[f.dim()] << "\n";
  }
  return os.str();
}

inline ExactPoly parse_text(const std::string& text, int dim) {
  std::istringstream in(text);
  std::string line;
  std::vector<ExactPoly::Term> raw;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line == "0") continue;
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
      const auto star = line.find(" * ", pos);
      parts.push_back(trim(line.substr(pos, star == std::string::npos ? std::string::npos : star - pos)));
      if (star == std::string::npos) break;
      pos = star + 3;
    }
    if (static_cast<int>(parts.size()) != dim + 2)
      throw std::invalid_argument("term '" + line + "' must list every variable z1..z" + std::to_string(dim) + " and l");
    ExactPoly::Term t{Exponent{}, parse_gaussian(parts[0])};
    for (int k = 0; k <= dim; ++k) {
      const std::string want = k < dim ? "z" + std::to_string(k + 1) + "^" : "l^";
      const std::string& p = parts[static_cast<std::size_t>(k) + 1];
      if (p.rfind(want, 0) != 0) throw std::invalid_argument("expected '" + want + "' in '" + line + "'");
      t.exp[k] = static_cast<std::int16_t>(std::stoi(p.substr(want.size())));
    }
    raw.push_back(std::move(t));
  }
  return ExactPoly::from_terms(dim, std::move(raw));
}

}  // namespace fermikit
