#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fermikit/lattice.hpp"
#include "support.hpp"

using namespace fermikit;

namespace {

PeriodicPotential from_ints(const PeriodSpec& p, std::vector<int> xs) {
  std::vector<GaussianRational> v;
  for (int x : xs) v.emplace_back(x);
  return PeriodicPotential::exact(p, std::move(v));
}

// Plain O(Q^2) transform used as the reference in float mode.
std::vector<std::complex<double>> naive_dft(const PeriodicPotential& v) {
  const auto& w = v.periods().domain();
  std::vector<std::complex<double>> out;
  for (const auto& l : w) {
    std::complex<double> s = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
      double ang = 0.0;
      for (int j = 0; j < v.dim(); ++j) ang += double(l[j] * w[n][j]) / v.periods().period(j);
      s += v.values()[n] * std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * ang));
    }
    out.push_back(s / double(w.size()));
  }
  return out;
}

}  // namespace

TEST_CASE("fundamental domain is lexicographic") {
  const auto p = fundamental_domain({2, 3});
  CHECK(p.volume() == 6);
  CHECK(p.domain() == std::vector<Site>{{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}});
  const auto one = fundamental_domain({1, 1});
  CHECK(one.volume() == 1);
  CHECK(one.domain() == std::vector<Site>{{0, 0}});
  CHECK(p.index_of({-1, 4}) == p.index_of({1, 1}));
}

TEST_CASE("non-coprime periods need the override") {
  CHECK_THROWS_AS(fundamental_domain({2, 4}), std::invalid_argument);
  const auto p = fundamental_domain({2, 4}, true);
  CHECK(p.tainted());
  CHECK(p.volume() == 8);
  CHECK_FALSE(fundamental_domain({1, 2, 3}).tainted());
  CHECK_THROWS(fundamental_domain({0}));
}

TEST_CASE("potential value count is validated") {
  CHECK_THROWS_AS(from_ints(fundamental_domain({2, 3}), {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("dft small cases") {
  const auto v = from_ints(fundamental_domain({2}), {1, 3});
  const auto t = dft(v);
  REQUIRE(t.exact_coeffs);
  CHECK(t.exact_at({0}) == GaussianRational(2));
  CHECK(t.exact_at({1}) == GaussianRational(-1));

  const auto p23 = fundamental_domain({2, 3});
  const auto c = PeriodicPotential::constant(p23, GaussianRational::from_ratio(7, 2));
  const auto tc = dft(c);
  CHECK(tc.degraded_to_float);
  CHECK(std::abs(tc.at({0, 0}) - 3.5) < 1e-14);
  for (std::size_t i = 1; i < tc.coeffs.size(); ++i) CHECK(std::abs(tc.coeffs[i]) < 1e-14);

  std::vector<int> delta(6, 0);
  delta[0] = 1;
  const auto td = dft(from_ints(p23, delta));
  for (const auto& x : td.coeffs) CHECK(std::abs(x - 1.0 / 6.0) < 1e-15);
}

TEST_CASE("dft matches a naive transform and inverts") {
  std::mt19937_64 rng(11);
  for (auto q : std::vector<std::vector<int>>{{2}, {3}, {2, 3}, {4}, {1, 2, 3}, {4, 3}, {2, 1}, {4, 1, 1}}) {
    const auto p = fundamental_domain(q);
    for (int trial = 0; trial < 100; ++trial) {
      const auto v = fktest::random_complex_potential(p, rng);
      const auto t = dft(v);
      const auto ref = naive_dft(v);
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(t.coeffs[i] - ref[i]) < 1e-12);
      const auto back = idft(t);
      if (t.exact_coeffs) {
        CHECK(back == v);
      } else {
        for (std::size_t i = 0; i < ref.size(); ++i)
          CHECK(std::abs(back.values()[i] - v.values()[i]) <= 1e-12 * std::max(1.0, std::abs(v.values()[i])));
      }
      CHECK(std::abs(average(v) - t.coeffs[0]) < 1e-12);
      if (t.exact_coeffs) CHECK(average_exact(v) == (*t.exact_coeffs)[0]);
    }
  }
}

TEST_CASE("average") {
  CHECK(average_exact(from_ints(fundamental_domain({2, 3}), {1, 2, 3, 4, 5, 6})) == GaussianRational::from_ratio(7, 2));
  CHECK(average_exact(PeriodicPotential::zero(fundamental_domain({3}))).is_zero());
}

TEST_CASE("real potentials have conjugate-symmetric transforms") {
  std::mt19937_64 rng(5);
  for (auto q : std::vector<std::vector<int>>{{2, 3}, {4}, {1, 2, 3}}) {
    const auto p = fundamental_domain(q);
    for (int trial = 0; trial < 20; ++trial) {
      CHECK(is_conjugate_symmetric(dft(fktest::random_real_potential(p, rng))));
      auto c = fktest::random_complex_potential(p, rng);
      if (!c.is_real()) CHECK_FALSE(is_conjugate_symmetric(dft(c)));
    }
  }
}

TEST_CASE("direct sum") {
  const auto v1 = from_ints(fundamental_domain({2}), {0, 1});
  const auto v2 = from_ints(fundamental_domain({3}), {0, 0, 5});
  const auto v = direct_sum({v1, v2}, {1, 1});
  CHECK(v.exact_at({1, 2}) == GaussianRational(6));
  CHECK(direct_sum({PeriodicPotential::zero(v1.periods()), PeriodicPotential::zero(v2.periods())}, {1, 1}).is_zero());
  CHECK_THROWS(direct_sum({v1, v2}, {2}));
  CHECK_THROWS(direct_sum({v1, v2}, {1, 2}));
}

TEST_CASE("separability round trip and Fourier support") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = fktest::random_real_potential(fundamental_domain({1}), rng);
    const auto b = fktest::random_real_potential(fundamental_domain({2}), rng);
    const auto c = fktest::random_real_potential(fundamental_domain({3}), rng);
    const auto v = direct_sum({a, b, c}, {1, 1, 1});
    const auto s = is_separable(v, {1, 1, 1});
    REQUIRE(s.separable);
    CHECK(fourier_support_separable(v, {1, 1, 1}));
    // Recovered parts differ from the inputs by constants summing to zero.
    GaussianRational shift;
    const std::vector<PeriodicPotential> in{a, b, c};
    for (std::size_t j = 0; j < 3; ++j) {
      const GaussianRational dj = s.parts[j].exact_values()[0] - in[j].exact_values()[0];
      for (std::size_t i = 0; i < in[j].exact_values().size(); ++i)
        CHECK(s.parts[j].exact_values()[i] - in[j].exact_values()[i] == dj);
      if (j > 0) CHECK(average_exact(s.parts[j]).is_zero());
      shift += dj;
    }
    CHECK(shift.is_zero());
    CHECK(direct_sum(s.parts, {1, 1, 1}) == v);

    const auto v12 = direct_sum({a, direct_sum({b, c}, {1, 1})}, {1, 2});
    CHECK(is_separable(v12, {1, 2}).separable);
    CHECK(is_separable(v12, {2, 1}).separable);
  }
}

TEST_CASE("product potential is not separable") {
  const auto p = fundamental_domain({2, 3});
  std::vector<std::complex<double>> vals;
  for (const auto& n : p.domain()) vals.push_back((n[0] ? -1.0 : 1.0) * std::cos(2.0 * std::numbers::pi * n[1] / 3.0));
  const auto v = PeriodicPotential::numeric(p, vals);
  const auto ref = naive_dft(v);
  CHECK(std::abs(ref[static_cast<std::size_t>(p.index_of({1, 1}))]) > 0.1);
  CHECK_FALSE(fourier_support_separable(v, {1, 1}));
  CHECK_FALSE(is_separable(v, {1, 1}).separable);

  // Exact version: (-1)^{n1} * (2 if n2 == 0 else -1), proportional to the same product.
  std::vector<GaussianRational> ex;
  for (const auto& n : p.domain()) ex.emplace_back((n[0] ? -1 : 1) * (n[1] == 0 ? 2 : -1));
  CHECK_FALSE(is_separable(PeriodicPotential::exact(p, ex), {1, 1}).separable);
}

TEST_CASE("constant potentials are separable for every partition") {
  const auto p = fundamental_domain({1, 2, 3});
  const auto c = PeriodicPotential::constant(p, GaussianRational(4));
  for (auto part : std::vector<Partition>{{1, 1, 1}, {1, 2}, {2, 1}, {3}}) CHECK(is_separable(c, part).separable);
}

TEST_CASE("translation and reflection") {
  const auto p = fundamental_domain({2, 3});
  const auto v = from_ints(p, {1, 2, 3, 4, 5, 6});
  const auto t = translated(v, {1, 1});
  CHECK(t.exact_at({0, 0}) == v.exact_at({1, 1}));
  CHECK(t.exact_at({1, 2}) == v.exact_at({0, 0}));
  const auto r = reflected(v);
  CHECK(r.exact_at({0, 1}) == v.exact_at({0, 2}));
  CHECK(reflected(r) == v);
}
