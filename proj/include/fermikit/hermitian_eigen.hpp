#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fermikit {

struct HermitianEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXcd vectors; // columns, empty unless requested
  int sweeps = 0;
};

/// Cyclic Jacobi for a dense Hermitian matrix. Only the upper triangle is trusted to be exact;
/// the lower one is overwritten with its conjugate first.
inline HermitianEigen jacobi_eigen(Eigen::MatrixXcd a, bool want_vectors = false, int max_sweeps = 100) {
  using C = std::complex<double>;
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix is not square");
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = a(i, i).real();
    for (Eigen::Index j = i + 1; j < n; ++j) a(j, i) = std::conj(a(i, j));
  }
  Eigen::MatrixXcd v;
  if (want_vectors) v = Eigen::MatrixXcd::Identity(n, n);
  const double scale = a.norm();
  HermitianEigen out;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= eps * scale || scale == 0.0) break;
    out.sweeps = sweep + 1;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const C apq = a(p, q);
        const double g = std::abs(apq);
        if (g <= eps * eps * scale) continue;
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * g);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        const C e = std::conj(apq / g);
        // Rotation J with J_pp = c, J_pq = s, J_qp = -s e, J_qq = c e; A <- J^H A J.
        const C jpp = c, jpq = s, jqp = -s * e, jqq = c * e;
        for (Eigen::Index k = 0; k < n; ++k) {
          const C akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const C apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        if (want_vectors) {
          for (Eigen::Index k = 0; k < n; ++k) {
            const C vkp = v(k, p), vkq = v(k, q);
            v(k, p) = vkp * jpp + vkq * jqp;
            v(k, q) = vkp * jpq + vkq * jqq;
          }
        }
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });
  out.values.resize(n);
  if (want_vectors) out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]).real();
    if (want_vectors) out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace fermikit
