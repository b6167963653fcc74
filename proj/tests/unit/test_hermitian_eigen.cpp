#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include <random>

#include "fermikit/hermitian_eigen.hpp"

using namespace fermikit;

namespace {

Eigen::MatrixXcd random_hermitian(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
  return (a + a.adjoint()) / 2.0;
}

}  // namespace

TEST_CASE("Jacobi on small matrices") {
  Eigen::MatrixXcd a(2, 2);
  a << 0.0, -2.0, -2.0, 0.0;
  const auto e = jacobi_eigen(a);
  CHECK(e.values(0) == Catch::Approx(-2.0).margin(1e-15));
  CHECK(e.values(1) == Catch::Approx(2.0).margin(1e-15));
  CHECK(jacobi_eigen(Eigen::MatrixXcd::Zero(3, 3)).values.norm() == 0.0);
  Eigen::MatrixXcd b(2, 2);
  b << 1.0, std::complex<double>(0.0, 1.0), std::complex<double>(0.0, -1.0), 1.0;
  const auto eb = jacobi_eigen(b);
  CHECK(std::abs(eb.values(0)) < 1e-15);
  CHECK(std::abs(eb.values(1) - 2.0) < 1e-15);
  CHECK_THROWS(jacobi_eigen(Eigen::MatrixXcd::Zero(2, 3)));
}

TEST_CASE("Jacobi agrees with a Householder solver and is backward stable") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 60; ++t) {
    const int n = 1 + t % 40;
    const double scale = t % 3 == 0 ? 1e3 : 1.0;
    const Eigen::MatrixXcd a = random_hermitian(n, rng, scale);
    const auto e = jacobi_eigen(a, true);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ref(a);
    const double norm = a.norm();
    CHECK((e.values - ref.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, norm));
    const Eigen::MatrixXcd residual = a * e.vectors - e.vectors * e.values.asDiagonal();
    CHECK(residual.norm() <= 1e-12 * std::max(1.0, norm));
    CHECK((e.vectors.adjoint() * e.vectors - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-12);
    for (int i = 1; i < n; ++i) CHECK(e.values(i - 1) <= e.values(i));
  }
}

TEST_CASE("Jacobi handles repeated eigenvalues") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXcd u = Eigen::HouseholderQR<Eigen::MatrixXcd>(random_hermitian(6, rng)).householderQ();
  Eigen::VectorXd d(6);
  d << -1, -1, 2, 2, 2, 5;
  const Eigen::MatrixXcd a = u * d.cast<std::complex<double>>().asDiagonal() * u.adjoint();
  const auto e = jacobi_eigen(a, true);
  CHECK((e.values - d).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a * e.vectors - e.vectors * e.values.asDiagonal()).norm() < 1e-12);
}
