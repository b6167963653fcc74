#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include "fermikit/floquet.hpp"
#include "support.hpp"

using namespace fermikit;

namespace {

ExactPoly z(int dim, int j, int p = 1) { return ExactPoly::z(dim, j, p); }
ExactPoly c(int dim, long v) { return ExactPoly::constant(dim, GaussianRational(v)); }

}  // namespace

TEST_CASE("symbolic Floquet matrix for small periods") {
  const auto m = floquet_matrix(PeriodicPotential::zero(fundamental_domain({2})));
  CHECK(m[0][0].is_zero());
  CHECK(m[1][1].is_zero());
  CHECK(m[0][1] == -(c(1, 1) + z(1, 0, -1)));
  CHECK(m[1][0] == -(c(1, 1) + z(1, 0)));

  const auto m1 = floquet_matrix(PeriodicPotential::constant(fundamental_domain({1}), GaussianRational(3)));
  CHECK(m1[0][0] == c(1, 3) - z(1, 0) - z(1, 0, -1));

  const auto m11 = floquet_matrix(PeriodicPotential::zero(fundamental_domain({1, 1})));
  CHECK(m11[0][0] == -(z(2, 0) + z(2, 0, -1) + z(2, 1) + z(2, 1, -1)));
}

TEST_CASE("Floquet matrix support and wraps") {
  std::mt19937_64 rng(1);
  const auto p = fundamental_domain({3, 4});
  const auto v = fktest::random_real_potential(p, rng);
  const auto m = floquet_matrix(v);
  for (int a = 0; a < p.volume(); ++a)
    for (int b = 0; b < p.volume(); ++b) {
      const auto& e = m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      if (a == b) {
        CHECK(e == ExactPoly::constant(2, v.exact_values()[static_cast<std::size_t>(a)]));
        continue;
      }
      int axis = -1, steps = 0;
      for (int j = 0; j < 2; ++j)
        if (p.site(a)[j] != p.site(b)[j]) {
          axis = j;
          ++steps;
        }
      const int diff = steps == 1 ? p.site(b)[axis] - p.site(a)[axis] : 0;
      const int q = steps == 1 ? p.period(axis) : 0;
      if (steps != 1 || (std::abs(diff) != 1 && std::abs(diff) != q - 1)) {
        CHECK(e.is_zero());
      } else if (std::abs(diff) == 1) {
        CHECK(e == c(2, -1));
      } else {
        // Wrap: leaving through n_j = q_j - 1 picks up z_j, through n_j = 0 picks up 1/z_j.
        CHECK(e == -z(2, axis, diff < 0 ? 1 : -1));
      }
    }
}

TEST_CASE("numeric Floquet matrix") {
  const auto v0 = PeriodicPotential::zero(fundamental_domain({2}));
  Eigen::MatrixXcd expect(2, 2);
  expect << 0.0, -2.0, -2.0, 0.0;
  CHECK((floquet_matrix_k(v0, {0.0}) - expect).norm() < 1e-15);
  CHECK(floquet_matrix_k(v0, {0.5}).norm() < 1e-15);
  std::mt19937_64 rng(2);
  for (auto q : std::vector<std::vector<int>>{{2, 3}, {1, 2, 3}, {5}}) {
    const auto v = fktest::random_real_potential(fundamental_domain(q), rng);
    for (int t = 0; t < 20; ++t) {
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      std::vector<double> k;
      for (std::size_t j = 0; j < q.size(); ++j) k.push_back(u(rng));
      const auto m = floquet_matrix_k(v, k);
      CHECK((m - m.adjoint()).norm() < 1e-14);
    }
  }
}

TEST_CASE("characteristic polynomial small cases") {
  // 2x2 by hand: lambda^2 - (1 + 1/z)(1 + z) = lambda^2 - z - 1/z - 2.
  CHECK(characteristic_polynomial(PeriodicPotential::zero(fundamental_domain({2}))) ==
        ExactPoly::lambda(1, 2) - z(1, 0) - z(1, 0, -1) - c(1, 2));
  CHECK(characteristic_polynomial(PeriodicPotential::zero(fundamental_domain({1, 1}))) ==
        -(z(2, 0) + z(2, 0, -1) + z(2, 1) + z(2, 1, -1) + ExactPoly::lambda(2)));
  CHECK(characteristic_polynomial(PeriodicPotential::constant(fundamental_domain({1}), GaussianRational(7))) ==
        c(1, 7) - z(1, 0) - z(1, 0, -1) - ExactPoly::lambda(1));
}

TEST_CASE("Bareiss agrees with cofactor expansion and pointwise elimination") {
  std::mt19937_64 rng(3);
  for (auto q : std::vector<std::vector<int>>{{2}, {3}, {4}, {2, 3}, {1, 2, 3}, {3, 1}}) {
    const auto p = fundamental_domain(q);
    for (int t = 0; t < 3; ++t) {
      const auto v = t == 0 ? fktest::random_complex_potential(p, rng) : fktest::random_real_potential(p, rng);
      const auto bar = characteristic_polynomial(v);
      CHECK(bar == characteristic_polynomial_cofactor(v));
      for (int s = 0; s < 5; ++s) {
        std::vector<GaussianRational> pt;
        for (std::size_t j = 0; j < q.size(); ++j) {
          GaussianRational x;
          while (x.is_zero()) x = fktest::random_gaussian(rng);
          pt.push_back(x);
        }
        const auto lam = fktest::random_gaussian(rng);
        CHECK(eval_exact(bar, pt, lam) == characteristic_value(v, pt, lam));
      }
      const auto lam0 = fktest::random_rational(rng);
      CHECK(characteristic_polynomial_at(v, lam0) == bar.specialize_lambda(lam0));
    }
  }
}

TEST_CASE("highest degree terms have unit coefficients") {
  std::mt19937_64 rng(4);
  for (auto q : std::vector<std::vector<int>>{{2, 3}, {1, 2, 3}, {3}, {2}}) {
    const auto p = fundamental_domain(q);
    for (int t = 0; t < 5; ++t) {
      const auto poly = characteristic_polynomial(fktest::random_real_potential(p, rng));
      const auto r = check_highest_degree(poly, p);
      CHECK(r.ok);
      INFO(r.detail);
    }
  }
  // A polynomial with a wrong leading coefficient is caught.
  const auto bad = ExactPoly::lambda(1, 2, GaussianRational(2)) - z(1, 0) - z(1, 0, -1);
  CHECK_FALSE(check_highest_degree(bad, fundamental_domain({2})).ok);
}

TEST_CASE("substituted characteristic polynomial is invariant under the root-of-unity action") {
  std::mt19937_64 rng(5);
  for (auto q : std::vector<std::vector<int>>{{2, 3}, {3}, {1, 2, 3}}) {
    const auto p = fundamental_domain(q);
    const auto poly = substitute_powers(characteristic_polynomial(fktest::random_real_potential(p, rng)), q);
    CHECK(is_mu_invariant(poly, q));
    std::vector<std::complex<double>> rho;
    std::vector<int> shifts;
    for (int qj : q) {
      shifts.push_back(qj - 1);
      rho.push_back(std::polar(1.0, 2.0 * 3.141592653589793 * (qj - 1) / qj));
    }
    const auto pt = fktest::random_complex_point(p.dim(), rng);
    const auto a = group_act_eval(poly, rho, q, pt, 0.3), b = eval(poly, pt, 0.3);
    CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)));
  }
}

TEST_CASE("characteristic polynomial is translation and reflection invariant") {
  std::mt19937_64 rng(6);
  const auto p = fundamental_domain({2, 3});
  for (int t = 0; t < 3; ++t) {
    const auto v = fktest::random_real_potential(p, rng);
    const auto poly = characteristic_polynomial(v);
    CHECK(characteristic_polynomial(translated(v, {1, 2})) == poly);
    CHECK(characteristic_polynomial(translated(v, {-3, 5})) == poly);
    CHECK(characteristic_polynomial(reflected(v)) == poly);
  }
}

TEST_CASE("eigenvalue product matches the characteristic polynomial") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto q : std::vector<std::vector<int>>{{2, 3}, {1, 2, 3}}) {
    const auto v = fktest::random_real_potential(fundamental_domain(q), rng);
    const auto poly = characteristic_polynomial(v);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> k;
      std::vector<std::complex<double>> zz;
      for (std::size_t j = 0; j < q.size(); ++j) {
        k.push_back(u(rng));
        zz.push_back(std::polar(1.0, 2.0 * 3.141592653589793 * k.back()));
      }
      const double lam = 10.0 * u(rng) - 5.0;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(floquet_matrix_k(v, k));
      double prod = 1.0;
      for (int i = 0; i < es.eigenvalues().size(); ++i) prod *= es.eigenvalues()(i) - lam;
      const auto val = eval(poly, zz, lam);
      CHECK(std::abs(val - prod) <= 1e-8 * std::max(1.0, std::abs(prod)));
    }
  }
}

TEST_CASE("polynomial part clears negative powers") {
  const auto p = fundamental_domain({2, 3});
  std::mt19937_64 rng(8);
  const auto poly = characteristic_polynomial(fktest::random_real_potential(p, rng));
  const auto part = polynomial_part(poly, p);
  CHECK(part.min_degree(0) == 0);
  CHECK(part.min_degree(1) == 0);
  CHECK(part.max_degree(0) == 6);
  CHECK(part.max_degree(1) == 4);
}

TEST_CASE("Fourier-side matrix is unitarily equivalent") {
  const auto p = fundamental_domain({2, 3});
  std::mt19937_64 rng(9);
  auto r0 = verify_fourier_equivalence(PeriodicPotential::zero(p), 20, 1e-10, 1);
  CHECK(r0.passed);
  auto rc = verify_fourier_equivalence(PeriodicPotential::constant(p, GaussianRational(3)), 20, 1e-10, 2);
  CHECK(rc.passed);
  for (int t = 0; t < 3; ++t) {
    const auto r = verify_fourier_equivalence(fktest::random_real_potential(p, rng), 100, 1e-10, 100 + t);
    CHECK(r.passed);
    CHECK(r.samples == 100);
  }
  const auto rcplx = verify_fourier_equivalence(fktest::random_complex_potential(fundamental_domain({3, 2}), rng), 30, 1e-9, 5);
  CHECK(rcplx.passed);

  // z = 1, q = (2), V = 0: both spectra are {-2, 2}.
  const auto v2 = PeriodicPotential::zero(fundamental_domain({2}));
  const auto a = fourier_block_matrix(v2, dft(v2), {1.0});
  CHECK(std::abs(a(0, 0) + 2.0) < 1e-15);
  CHECK(std::abs(a(1, 1) - 2.0) < 1e-15);

  // A result is reproducible for a given seed.
  const auto v = fktest::random_real_potential(p, rng);
  CHECK(verify_fourier_equivalence(v, 10, 1e-10, 42).max_eigenvalue_error ==
        verify_fourier_equivalence(v, 10, 1e-10, 42).max_eigenvalue_error);
}
