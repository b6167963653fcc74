#pragma once

// Numerical count of the absolutely irreducible factors of a squarefree f(x, y): after a generic
// shear x -> x + s y the roots y_1(x), ..., y_D(x) are continued along random closed triangles
// in the x-plane; factors correspond to orbits of the resulting permutations.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "fermikit/laurent.hpp"

namespace fktest {

using C = std::complex<double>;

class RootTracker {
 public:
  /// f uses z1 as x and lambda as y (dimension 1).
  RootTracker(const fermikit::ExactPoly& f, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const C s(u(rng), u(rng));
    int deg = 0;
    for (const auto& t : f.terms()) deg = std::max(deg, t.exp[0] + t.exp[1]);
    degree_ = deg;
    // g(x, y) = f(x + s y, y) as a dense array g[i][j] for x^i y^j.
    g_.assign(static_cast<std::size_t>(deg + 1), std::vector<C>(static_cast<std::size_t>(deg + 1), 0.0));
    for (const auto& t : f.terms()) {
      const int a = t.exp[0], b = t.exp[1];
      if (a < 0 || b < 0) throw std::invalid_argument("monodromy oracle needs a polynomial");
      const C c = t.coeff.to_complex();
      // (x + s y)^a y^b = sum_k binom(a, k) x^k (s y)^(a - k) y^b
      double binom = 1.0;
      for (int k = 0; k <= a; ++k) {
        g_[static_cast<std::size_t>(k)][static_cast<std::size_t>(a - k + b)] += c * binom * std::pow(s, a - k);
        binom = binom * (a - k) / (k + 1);
      }
    }
  }

  int degree() const { return degree_; }

  std::vector<C> roots(C x) const {
    std::vector<C> a(static_cast<std::size_t>(degree_ + 1), 0.0);
    for (int j = 0; j <= degree_; ++j) {
      C v = 0.0;
      for (int i = degree_; i >= 0; --i) v = v * x + g_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      a[static_cast<std::size_t>(j)] = v;
    }
    const C lead = a.back();
    if (std::abs(lead) < 1e-12) throw std::runtime_error("degenerate shear");
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(degree_, degree_);
    for (int i = 1; i < degree_; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < degree_; ++i) comp(i, degree_ - 1) = -a[static_cast<std::size_t>(i)] / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    return std::vector<C>(es.eigenvalues().data(), es.eigenvalues().data() + degree_);
  }

  /// Continues the roots from `from` to `to`; returns nullopt when the path passes too close to a
  /// branch point to resolve.
  std::optional<std::vector<C>> continue_roots(std::vector<C> ys, C from, C to) const {
    double t = 0.0, h = 1e-2;
    while (t < 1.0) {
      const double step = std::min(h, 1.0 - t);
      const auto next = roots(from + (to - from) * (t + step));
      double sep = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < ys.size(); ++i)
        for (std::size_t j = i + 1; j < ys.size(); ++j) sep = std::min(sep, std::abs(ys[i] - ys[j]));
      std::vector<C> matched(ys.size());
      std::vector<char> used(next.size(), 0);
      bool ok = true;
      for (std::size_t i = 0; i < ys.size() && ok; ++i) {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < next.size(); ++j) {
          const double dist = std::abs(next[j] - ys[i]);
          if (dist < bd) {
            bd = dist;
            best = j;
          }
        }
        ok = !used[best] && bd < 0.2 * sep;
        used[best] = 1;
        matched[i] = next[best];
      }
      if (!ok) {
        h /= 2;
        if (h < 1e-10) return std::nullopt;
        continue;
      }
      ys = std::move(matched);
      t += step;
      h = std::min(0.05, h * 1.5);
    }
    return ys;
  }

 private:
  int degree_ = 0;
  std::vector<std::vector<C>> g_;
};

/// Orbit count of the monodromy action on the roots of a squarefree polynomial.
inline int monodromy_factor_count(const fermikit::ExactPoly& f, std::uint64_t seed = 1, int loops = 60) {
  std::mt19937_64 rng(seed);
  const RootTracker tr(f, rng);
  const int n = tr.degree();
  if (n == 0) throw std::invalid_argument("constant polynomial");
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const C base(u(rng) * 0.1, u(rng) * 0.1);
  const auto start = tr.roots(base);
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
    return i;
  };
  int done = 0;
  for (int attempt = 0; done < loops && attempt < 10 * loops; ++attempt) {
    const double radius = attempt % 3 == 2 ? 40.0 : 8.0;
    const C a(u(rng) * radius, u(rng) * radius), b(u(rng) * radius, u(rng) * radius);
    auto ys = tr.continue_roots(start, base, a);
    if (ys) ys = tr.continue_roots(*ys, a, b);
    if (ys) ys = tr.continue_roots(*ys, b, base);
    if (!ys) continue;
    ++done;
    for (int i = 0; i < n; ++i) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < start.size(); ++j)
        if (std::abs(start[j] - (*ys)[static_cast<std::size_t>(i)]) < std::abs(start[best] - (*ys)[static_cast<std::size_t>(i)])) best = j;
      parent[static_cast<std::size_t>(find(i))] = find(static_cast<int>(best));
    }
  }
  if (done < loops) throw std::runtime_error("monodromy: too many unresolved loops");
  int orbits = 0;
  for (int i = 0; i < n; ++i) orbits += find(i) == i ? 1 : 0;
  return orbits;
}

}  // namespace fktest
