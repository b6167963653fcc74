#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fermikit/bivariate.hpp"
#include "fermikit/cyclotomic.hpp"
#include "fermikit/floquet.hpp"
#include "fermikit/lattice.hpp"
#include "fermikit/laurent.hpp"
#include "fermikit/modular.hpp"
#include "fermikit/parallel.hpp"

namespace fermikit {

/// Exact Q(i) arithmetic or arithmetic modulo a random word-size prime (one prime per slice).
enum class CountBackend { exact, modular };

struct FactorCountOptions {
  int trials = 5;
  std::uint64_t seed = 1;
  CountBackend backend = CountBackend::modular;
  double confidence = 0.8;
  int max_attempts_per_trial = 20;
};

struct FactorReport {
  /// Absolutely irreducible factors counted with multiplicity (modal value over slices).
  int count = 0;
  int distinct = 0;
  std::string method;  // "bivariate-direct" or "sliced"
  std::string backend;
  int trials = 0;
  int rejected_slices = 0;
  double agreement = 1.0;
  bool confident = true;
  std::uint64_t seed = 0;
  bool tainted = false;
  std::vector<int> slice_counts;
};

/// The bivariate polynomial in variables (x_var, y_var) of a Laurent polynomial that depends on
/// no other variable and has no negative exponents.
template <class F, class Lift>
BiPoly<F> to_bivariate(const ExactPoly& f, int x_var, int y_var, Lift&& lift) {
  std::vector<std::vector<F>> dense;
  for (const auto& t : f.terms()) {
    for (int k = 0; k < f.nvars(); ++k) {
      if (k == x_var || k == y_var) continue;
      if (t.exp[k] != 0) throw std::invalid_argument("polynomial depends on a variable outside the chosen pair");
    }
    const int a = t.exp[x_var], b = y_var >= 0 ? t.exp[y_var] : 0;
    if (a < 0 || b < 0) throw std::invalid_argument("bivariate view needs non-negative exponents");
    if (static_cast<int>(dense.size()) <= a) dense.resize(static_cast<std::size_t>(a) + 1);
    auto& row = dense[static_cast<std::size_t>(a)];
    if (static_cast<int>(row.size()) <= b) row.resize(static_cast<std::size_t>(b) + 1, F(0));
    row[static_cast<std::size_t>(b)] += lift(t.coeff);
  }
  return BiPoly<F>::from_dense(dense);
}

/// Total degree of f in the listed variables.
inline int total_degree_in(const ExactPoly& f, const std::vector<int>& vars) {
  int d = 0;
  for (const auto& t : f.terms()) {
    int s = 0;
    for (int k : vars) s += t.exp[k];
    d = std::max(d, s);
  }
  return d;
}

/// f restricted to the plane var_k = p_k + u_k x + v_k y (k over `vars`); f must be a polynomial.
template <class F, class Lift>
BiPoly<F> slice_polynomial(const ExactPoly& f, const std::vector<int>& vars, const std::vector<F>& p,
                           const std::vector<F>& u, const std::vector<F>& v, Lift&& lift) {
  using Coeff = UPoly<F>;
  const std::size_t nv = vars.size();
  std::vector<std::vector<BiPoly<F>>> powers(nv);
  for (std::size_t k = 0; k < nv; ++k) {
    const BiPoly<F> form(std::vector<Coeff>{Coeff(std::vector<F>{p[k], v[k]}), Coeff::constant(u[k])});
    powers[k].push_back(BiPoly<F>({Coeff::constant(F(1))}));
    int top = 0;
    for (const auto& t : f.terms()) {
      if (t.exp[vars[k]] < 0) throw std::invalid_argument("slicing needs a polynomial");
      top = std::max(top, int(t.exp[vars[k]]));
    }
    for (int e = 1; e <= top; ++e) powers[k].push_back(powers[k].back() * form);
  }
  // Group terms by their exponents in all but the last variable.
  std::map<std::vector<int>, BiPoly<F>> groups;
  for (const auto& t : f.terms()) {
    std::vector<int> prefix;
    for (std::size_t k = 0; k + 1 < nv; ++k) prefix.push_back(t.exp[vars[k]]);
    auto& acc = groups[prefix];
    acc = acc + Coeff::constant(lift(t.coeff)) * powers[nv - 1][static_cast<std::size_t>(t.exp[vars[nv - 1]])];
  }
  BiPoly<F> out;
  for (const auto& [prefix, acc] : groups) {
    BiPoly<F> term = acc;
    for (std::size_t k = 0; k < prefix.size(); ++k) term = term * powers[k][static_cast<std::size_t>(prefix[k])];
    out = out + term;
  }
  return out;
}

namespace detail {

inline FactorReport modal_report(std::vector<FactorCount> counts, int rejected, const FactorCountOptions& opt) {
  FactorReport r;
  r.method = "sliced";
  r.backend = opt.backend == CountBackend::exact ? "exact" : "modular";
  r.trials = static_cast<int>(counts.size());
  r.rejected_slices = rejected;
  r.seed = opt.seed;
  std::map<int, int> freq;
  for (const auto& c : counts) {
    ++freq[c.with_multiplicity];
    r.slice_counts.push_back(c.with_multiplicity);
  }
  int best = 0, hits = 0;
  for (const auto& [k, n] : freq)
    if (n > hits) {
      best = k;
      hits = n;
    }
  r.count = best;
  for (const auto& c : counts)
    if (c.with_multiplicity == best) {
      r.distinct = c.distinct;
      break;
    }
  r.agreement = counts.empty() ? 0.0 : double(hits) / double(counts.size());
  r.confident = r.agreement >= opt.confidence;
  return r;
}

template <class Rng>
GaussianRational random_slice_coordinate(Rng& rng) {
  std::uniform_int_distribution<int> num(-20, 20), den(1, 5);
  return GaussianRational::from_ratio(num(rng), den(rng));
}

}  // namespace detail

/// Counts absolutely irreducible factors of a polynomial in the listed variables by restricting
/// it to random affine planes (a generic plane section keeps irreducible components of
/// dimension >= 2 irreducible). Slices whose degree drops are rejected and redrawn.
inline FactorReport sliced_factor_count(const ExactPoly& f, const std::vector<int>& vars,
                                        const FactorCountOptions& opt) {
  if (opt.trials < 5) throw std::invalid_argument("sliced counting needs at least 5 trials");
  if (f.is_zero() || f.is_monomial()) throw std::invalid_argument("factor count of a zero or monomial polynomial");
  const int deg = total_degree_in(f, vars);
  std::vector<std::optional<FactorCount>> counts(static_cast<std::size_t>(opt.trials));
  std::vector<int> rejected(static_cast<std::size_t>(opt.trials), 0);
  parallel_for(static_cast<std::size_t>(opt.trials), [&](std::size_t trial) {
    auto rng = substream(opt.seed, trial);
    for (int attempt = 0; attempt < opt.max_attempts_per_trial; ++attempt) {
      std::vector<GaussianRational> p, u, v;
      for (std::size_t k = 0; k < vars.size(); ++k) {
        p.push_back(detail::random_slice_coordinate(rng));
        u.push_back(detail::random_slice_coordinate(rng));
        v.push_back(detail::random_slice_coordinate(rng));
      }
      auto good = [deg](const auto& s) { return s.total_degree() == deg && s.deg_x() == deg && s.deg_y() == deg; };
      if (opt.backend == CountBackend::exact) {
        const auto s = slice_polynomial<GaussianRational>(f, vars, p, u, v, [](const GaussianRational& c) { return c; });
        if (!good(s)) {
          ++rejected[trial];
          continue;
        }
        counts[trial] = count_absolute_factors(s);
        return;
      }
      const std::uint64_t prime = random_gaussian_prime(rng);
      ModularScope scope(prime);
      const ModP iu = sqrt_minus_one();
      bool ok = true;
      auto lift = [&](const GaussianRational& c) {
        auto r = reduce(c, iu);
        if (!r) {
          ok = false;
          return ModP(0);
        }
        return *r;
      };
      std::vector<ModP> pm, um, vm;
      for (std::size_t k = 0; k < vars.size(); ++k) {
        pm.push_back(lift(p[k]));
        um.push_back(lift(u[k]));
        vm.push_back(lift(v[k]));
      }
      const auto s = slice_polynomial<ModP>(f, vars, pm, um, vm, lift);
      if (!ok || !good(s)) {
        ++rejected[trial];
        continue;
      }
      counts[trial] = count_absolute_factors(s);
      return;
    }
  });
  std::vector<FactorCount> got;
  int rej = 0;
  for (std::size_t t = 0; t < counts.size(); ++t) {
    rej += rejected[t];
    if (counts[t]) got.push_back(*counts[t]);
  }
  if (got.empty()) throw std::runtime_error("every slice was degenerate");
  return detail::modal_report(std::move(got), rej, opt);
}

/// Direct count for a polynomial in two variables (y_var = -1 for a univariate polynomial).
inline FactorReport direct_factor_count(const ExactPoly& f, int x_var, int y_var, const FactorCountOptions& opt) {
  FactorReport r;
  r.method = "bivariate-direct";
  r.trials = 1;
  r.seed = opt.seed;
  FactorCount c;
  if (opt.backend == CountBackend::exact) {
    r.backend = "exact";
    c = count_absolute_factors(to_bivariate<GaussianRational>(f, x_var, y_var, [](const GaussianRational& x) { return x; }));
  } else {
    r.backend = "modular";
    auto rng = substream(opt.seed, 0);
    for (;;) {
      ModularScope scope(random_gaussian_prime(rng));
      const ModP iu = sqrt_minus_one();
      bool ok = true;
      const auto b = to_bivariate<ModP>(f, x_var, y_var, [&](const GaussianRational& x) {
        auto m = reduce(x, iu);
        ok = ok && m.has_value();
        return m.value_or(ModP(0));
      });
      if (!ok || b.deg_x() != std::max(0, f.max_degree(x_var)) ||
          (y_var >= 0 && b.deg_y() != std::max(0, f.max_degree(y_var))))
        continue;
      c = count_absolute_factors(b);
      break;
    }
  }
  r.count = c.with_multiplicity;
  r.distinct = c.distinct;
  r.slice_counts = {c.with_multiplicity};
  return r;
}

/// Absolutely irreducible factors of P_V(z, lambda0) as a Laurent polynomial in z (monomial
/// units discarded). d = 1, 2 are counted directly; d >= 3 on random plane sections.
inline FactorReport fermi_factor_count(const PeriodicPotential& v, const GaussianRational& lambda0,
                                       FactorCountOptions opt = {}) {
  const ExactPoly body = unit_normalize(characteristic_polynomial_at(v, lambda0)).body;
  const int d = v.dim();
  FactorReport r;
  if (body.is_monomial()) {
    r.method = "bivariate-direct";
    r.count = 0;
  } else if (d <= 2) {
    if (d == 2) opt.backend = CountBackend::exact;
    r = direct_factor_count(body, 0, d == 2 ? 1 : -1, opt);
  } else {
    std::vector<int> vars(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) vars[static_cast<std::size_t>(j)] = j;
    r = sliced_factor_count(body, vars, opt);
  }
  r.tainted = v.periods().tainted();
  return r;
}

/// Absolutely irreducible factors of P_V(z, lambda) in the d + 1 variables (z, lambda).
inline FactorReport bloch_factor_count(const PeriodicPotential& v, FactorCountOptions opt = {}) {
  const ExactPoly body = unit_normalize(characteristic_polynomial(v)).body;
  const int d = v.dim();
  FactorReport r;
  if (d == 1) {
    r = direct_factor_count(body, 0, 1, opt);
  } else {
    std::vector<int> vars(static_cast<std::size_t>(d) + 1);
    for (int j = 0; j <= d; ++j) vars[static_cast<std::size_t>(j)] = j;
    r = sliced_factor_count(body, vars, opt);
  }
  r.tainted = v.periods().tainted();
  return r;
}

// ---------------------------------------------------------------------------
// Zero potential: determinant-free reference polynomials.

struct ZeroPotentialReference {
  /// P_0(z, lambda), or P_0(z, lambda0) when a value was supplied.
  ExactPoly polynomial;
  /// For d = 2 at lambda = 0: P_0 = (-1)^Q f g with f from prod (rho_1 z_1 + rho_2 z_2) and g from
  /// prod (1 + 1/(rho_1 rho_2 z_1 z_2)).
  std::optional<ExactPoly> f, g;
};

namespace detail {

// rho_j^{n_j} z_j^{power} for the cyclotomic order N.
inline LaurentPoly<Cyclotomic> rotated_monomial(const PeriodSpec& p, int order, const Site& n, int j, int power) {
  const long k = long(power) * n[static_cast<std::size_t>(j)] * (order / p.period(j));
  return LaurentPoly<Cyclotomic>::monomial(p.dim(), [&] {
    Exponent e{};
    e[j] = static_cast<std::int16_t>(power);
    return e;
  }(), Cyclotomic::root(order, k));
}

inline ExactPoly collapse_to_gaussian(const LaurentPoly<Cyclotomic>& tilde, const std::vector<int>& q) {
  if (!is_mu_invariant(tilde, q)) throw std::logic_error("product over the fundamental domain is not mu-invariant");
  const auto collapsed = collapse_powers(tilde, q);
  return collapsed.map_coefficients<GaussianRational>([](const Cyclotomic& c) {
    auto g = c.to_gaussian();
    if (!g) throw std::logic_error("collapsed coefficient is not a Gaussian rational");
    return *g;
  });
}

}  // namespace detail

/// Expands (-1)^Q prod_{n in W} (sum_j (rho z_j + 1/(rho z_j)) + lambda) in the substituted
/// variables with exact cyclotomic phases, checks invariance under the root-of-unity action and
/// collapses z_j^{q_j} -> z_j. Independent of any determinant code.
inline ZeroPotentialReference zero_potential_reference(const PeriodSpec& p,
                                                       const std::optional<GaussianRational>& lambda = std::nullopt) {
  const int d = p.dim(), order = cyclotomic_order_for(p.periods());
  using CPoly = LaurentPoly<Cyclotomic>;
  const CPoly lam = lambda ? CPoly::constant(d, Cyclotomic(order, *lambda))
                           : CPoly::monomial(d, [&] {
                               Exponent e{};
                               e[d] = 1;
                               return e;
                             }(), Cyclotomic::root(order, 0));
  CPoly prod = CPoly::constant(d, Cyclotomic(order, GaussianRational(p.volume() % 2 == 0 ? 1 : -1)));
  for (const auto& n : p.domain()) {
    CPoly factor = lam;
    for (int j = 0; j < d; ++j)
      factor += detail::rotated_monomial(p, order, n, j, 1) + detail::rotated_monomial(p, order, n, j, -1);
    prod *= factor;
  }
  ZeroPotentialReference ref;
  ref.polynomial = detail::collapse_to_gaussian(prod, p.periods());
  if (d == 2 && lambda && lambda->is_zero()) {
    CPoly f = CPoly::constant(d, Cyclotomic::root(order, 0)), g = f;
    for (const auto& n : p.domain()) {
      f *= detail::rotated_monomial(p, order, n, 0, 1) + detail::rotated_monomial(p, order, n, 1, 1);
      g *= CPoly::constant(d, Cyclotomic::root(order, 0)) +
           detail::rotated_monomial(p, order, n, 0, -1) * detail::rotated_monomial(p, order, n, 1, -1);
    }
    ref.f = detail::collapse_to_gaussian(f, p.periods());
    ref.g = detail::collapse_to_gaussian(g, p.periods());
  }
  return ref;
}

struct LowestComponentReport {
  bool ok = true;
  /// Largest |difference| seen in the floating-point cross-check.
  double numeric_error = 0.0;
  std::string detail;
};

/// Checks that the lowest-degree components of P_V(z^q, lambda) for the gradings
/// (+1, ..., +1) and (+1, ..., +1, -1) are
///   (-1)^Q prod_n sum_j 1/(rho_j z_j)   and   (-1)^Q prod_n (sum_{j<d} 1/(rho_j z_j) + rho_d z_d),
/// neither of which depends on V. Exact over Q(zeta_N), plus a numeric evaluation at `samples`
/// random points.
inline LowestComponentReport lowest_component_check(const PeriodicPotential& v, int samples = 50,
                                                    std::uint64_t seed = 1) {
  const PeriodSpec& p = v.periods();
  const int d = p.dim(), order = cyclotomic_order_for(p.periods());
  using CPoly = LaurentPoly<Cyclotomic>;
  const ExactPoly tilde = substitute_powers(characteristic_polynomial(v), p.periods());
  const CPoly tilde_c = to_cyclotomic_poly(tilde, order);
  LowestComponentReport rep;
  std::ostringstream os;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(0.5, 1.5), angle(0.0, 2.0 * std::numbers::pi);
  for (int variant = 0; variant < 2; ++variant) {
    std::vector<int> signs(static_cast<std::size_t>(d), 1);
    if (variant == 1) signs.back() = -1;
    CPoly expect = CPoly::constant(d, Cyclotomic(order, GaussianRational(p.volume() % 2 == 0 ? 1 : -1)));
    for (const auto& n : p.domain()) {
      CPoly factor(d);
      for (int j = 0; j < d; ++j) factor += detail::rotated_monomial(p, order, n, j, -signs[static_cast<std::size_t>(j)]);
      expect *= factor;
    }
    const CPoly got = lowest_component(tilde_c, signs);
    if (got != expect) {
      rep.ok = false;
      os << (variant == 0 ? "all-plus" : "minus-on-last") << " grading: lowest component differs; ";
    }
    for (int s = 0; s < samples; ++s) {
      std::vector<Complex> z;
      for (int j = 0; j < d; ++j) z.push_back(std::polar(radius(rng), angle(rng)));
      const Complex a = eval(got, z, 0.0), b = eval(expect, z, 0.0);
      rep.numeric_error = std::max(rep.numeric_error, std::abs(a - b) / std::max(1.0, std::abs(b)));
    }
  }
  if (rep.numeric_error > 1e-10) {
    rep.ok = false;
    os << "numeric mismatch " << rep.numeric_error << "; ";
  }
  rep.detail = os.str();
  return rep;
}

}  // namespace fermikit
