#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fermikit/floquet.hpp"
#include "fermikit/lattice.hpp"
#include "fermikit/parallel.hpp"

namespace fermikit {

namespace detail {

inline void require_same_periods(const PeriodicPotential& v, const PeriodicPotential& y) {
  if (v.periods().periods() != y.periods().periods())
    throw std::invalid_argument("potentials have different periods: " + v.periods().to_string() + " vs " +
                                y.periods().to_string());
  if (!v.is_exact() || !y.is_exact()) throw std::invalid_argument("isospectrality checks need exact potentials");
}

}  // namespace detail

/// P_V(z, lambda0) == P_Y(z, lambda0) as Laurent polynomials in z.
inline bool fermi_isospectral(const PeriodicPotential& v, const PeriodicPotential& y, const GaussianRational& lambda0) {
  detail::require_same_periods(v, y);
  return characteristic_polynomial_at(v, lambda0) == characteristic_polynomial_at(y, lambda0);
}

/// P_V(z, lambda) == P_Y(z, lambda) identically.
inline bool floquet_isospectral(const PeriodicPotential& v, const PeriodicPotential& y) {
  detail::require_same_periods(v, y);
  return characteristic_polynomial(v) == characteristic_polynomial(y);
}

/// sum over n, n' in W of |hat V(n - n')|^2 / (h_n(z) h_n'(z)) with h_n(z) = sum_j rho^j_{n_j} z_j.
/// `scale` receives the sum of the absolute values of the terms.
inline Complex fourier_pole_sum(const FourierTable& t, const std::vector<Complex>& z, double* scale = nullptr) {
  const PeriodSpec& p = t.periods;
  const auto& w = p.domain();
  std::vector<Complex> h(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    Complex s = 0.0;
    for (int j = 0; j < p.dim(); ++j)
      s += std::polar(1.0, 2.0 * std::numbers::pi * w[i][static_cast<std::size_t>(j)] / p.period(j)) * z[static_cast<std::size_t>(j)];
    h[i] = s;
  }
  Complex total = 0.0;
  double abs_total = 0.0;
  Site diff(static_cast<std::size_t>(p.dim()));
  for (std::size_t a = 0; a < w.size(); ++a)
    for (std::size_t b = 0; b < w.size(); ++b) {
      for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = w[a][j] - w[b][j];
      const Complex term = std::norm(t.at(diff)) / (h[a] * h[b]);
      total += term;
      abs_total += std::abs(term);
    }
  if (scale) *scale = abs_total;
  return total;
}

struct InvariantsReport {
  bool means_equal = false;
  bool sums_agree = false;
  int samples = 0;
  int rejected_points = 0;
  double max_relative_error = 0.0;
  bool passed() const { return means_equal && sums_agree; }
};

/// For a Fermi isospectral pair: [V] = [Y] exactly, and the pole sums of |hat V|^2 and |hat Y|^2
/// agree at `samples` random complex z kept at distance >= 1e-3 |z| from every pole hyperplane.
/// Agreement is relative to the sum of absolute values of the terms.
inline InvariantsReport verify_isospectral_invariants(const PeriodicPotential& v, const PeriodicPotential& y,
                                                      const GaussianRational& lambda0, int samples = 50,
                                                      std::uint64_t seed = 1, double tol = 1e-9) {
  detail::require_same_periods(v, y);
  if (!v.is_real() || !y.is_real()) throw std::invalid_argument("invariant check needs real potentials");
  if (!fermi_isospectral(v, y, lambda0)) throw std::invalid_argument("potentials are not Fermi isospectral at lambda0");
  InvariantsReport rep;
  rep.means_equal = average_exact(v) == average_exact(y);
  const FourierTable tv = dft(v), ty = dft(y);
  const PeriodSpec& p = v.periods();
  std::vector<double> errors(static_cast<std::size_t>(samples), 0.0);
  std::vector<int> rejections(static_cast<std::size_t>(samples), 0);
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t s) {
    auto rng = substream(seed, s);
    std::normal_distribution<double> g(0.0, 1.0);
    for (;;) {
      std::vector<Complex> z(static_cast<std::size_t>(p.dim()));
      double norm = 0.0;
      for (auto& zj : z) {
        zj = {g(rng), g(rng)};
        norm += std::norm(zj);
      }
      norm = std::sqrt(norm);
      bool near_pole = false;
      for (const auto& n : p.domain()) {
        Complex h = 0.0;
        for (int j = 0; j < p.dim(); ++j)
          h += std::polar(1.0, 2.0 * std::numbers::pi * n[static_cast<std::size_t>(j)] / p.period(j)) * z[static_cast<std::size_t>(j)];
        near_pole = near_pole || std::abs(h) < 1e-3 * norm;
      }
      if (near_pole) {
        ++rejections[s];
        continue;
      }
      double sv = 0.0, sy = 0.0;
      const Complex a = fourier_pole_sum(tv, z, &sv), b = fourier_pole_sum(ty, z, &sy);
      errors[s] = std::abs(a - b) / std::max({sv, sy, 1e-300});
      return;
    }
  });
  rep.samples = samples;
  for (std::size_t s = 0; s < errors.size(); ++s) {
    rep.max_relative_error = std::max(rep.max_relative_error, errors[s]);
    rep.rejected_points += rejections[s];
  }
  rep.sums_agree = rep.max_relative_error <= tol;
  return rep;
}

enum class FactorMove { identity, translation, reflection };

struct FactorTransform {
  FactorMove move = FactorMove::identity;
  int shift = 0;  // used by translation
};

struct IsoPair {
  PeriodicPotential v;
  PeriodicPotential y;
  std::string provenance;
};

/// V = V_1 + ... + V_d over single coordinates with integer values in [-5, 5]; Y applies the
/// requested 1-D translation or reflection to each factor. Throws if the result is not Floquet
/// isospectral.
inline IsoPair generate_isospectral_pair(const PeriodSpec& periods, const std::vector<FactorTransform>& transforms,
                                         std::uint64_t seed) {
  const int d = periods.dim();
  if (d < 2) throw std::invalid_argument("isospectral pairs need d >= 2");
  if (static_cast<int>(transforms.size()) != d) throw std::invalid_argument("one transform per coordinate required");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> val(-5, 5);
  std::vector<PeriodicPotential> vs, ys;
  std::ostringstream prov;
  for (int j = 0; j < d; ++j) {
    const PeriodSpec pj = fundamental_domain({periods.period(j)});
    std::vector<GaussianRational> vals;
    for (int i = 0; i < pj.volume(); ++i) vals.push_back(GaussianRational(val(rng)));
    const auto vj = PeriodicPotential::exact(pj, std::move(vals));
    vs.push_back(vj);
    const auto& t = transforms[static_cast<std::size_t>(j)];
    if (j) prov << ' ';
    switch (t.move) {
      case FactorMove::identity:
        ys.push_back(vj);
        prov << "identity";
        break;
      case FactorMove::translation:
        ys.push_back(translated(vj, {t.shift}));
        prov << "translation(" << t.shift << ")";
        break;
      case FactorMove::reflection:
        ys.push_back(reflected(vj));
        prov << "reflection";
        break;
    }
  }
  const Partition ones(static_cast<std::size_t>(d), 1);
  IsoPair pair{direct_sum(vs, ones, periods.tainted()), direct_sum(ys, ones, periods.tainted()), prov.str()};
  if (!floquet_isospectral(pair.v, pair.y)) throw std::logic_error("generated pair is not Floquet isospectral");
  return pair;
}

struct RigidityReport {
  std::vector<PeriodicPotential> candidates;
  long trials = 0;
  long trivial_matches = 0;   // V = 0 hits, filtered
  long pointwise_passes = 0;  // survived the pointwise filter and went to full comparison
};

/// Randomised search for nonzero small rational V with P_V(., lambda0) = P_0(., lambda0). Each
/// trial is screened by exact evaluation at two fixed points; survivors are compared as
/// polynomials before being reported. Half of the trials are shifted to mean zero.
inline RigidityReport rigidity_search_zero(const PeriodSpec& periods, const GaussianRational& lambda0, long budget,
                                           std::uint64_t seed, bool inject_zero = false) {
  const auto zero = PeriodicPotential::zero(periods);
  const ExactPoly target = characteristic_polynomial_at(zero, lambda0);
  const int d = periods.dim();
  std::vector<std::vector<GaussianRational>> points(2);
  for (int j = 0; j < d; ++j) {
    points[0].push_back(GaussianRational::from_ratio(j + 2, 3 + j));
    points[1].push_back(GaussianRational(mpq_class(1, j + 2), mpq_class(-1, 2 * j + 5)));
  }
  const GaussianRational target0 = characteristic_value(zero, points[0], lambda0);
  const GaussianRational target1 = characteristic_value(zero, points[1], lambda0);

  std::vector<char> hit(static_cast<std::size_t>(budget), 0), trivial(static_cast<std::size_t>(budget), 0);
  std::vector<std::optional<PeriodicPotential>> found(static_cast<std::size_t>(budget));
  parallel_for(static_cast<std::size_t>(budget), [&](std::size_t i) {
    auto rng = substream(seed, i);
    std::uniform_int_distribution<int> num(-2, 2), den(1, 2), coin(0, 1);
    std::vector<GaussianRational> vals;
    for (int s = 0; s < periods.volume(); ++s) vals.push_back(GaussianRational::from_ratio(num(rng), den(rng)));
    if (inject_zero && i == 0) std::fill(vals.begin(), vals.end(), GaussianRational());
    auto v = PeriodicPotential::exact(periods, std::move(vals));
    if (coin(rng)) v = shifted(v, -average_exact(v));
    if (v.is_zero()) {
      trivial[i] = 1;
      return;
    }
    if (characteristic_value(v, points[0], lambda0) != target0) return;
    if (characteristic_value(v, points[1], lambda0) != target1) return;
    hit[i] = 1;
    if (characteristic_polynomial_at(v, lambda0) == target) found[i] = v;
  });
  RigidityReport rep;
  rep.trials = budget;
  for (std::size_t i = 0; i < hit.size(); ++i) {
    rep.trivial_matches += trivial[i];
    rep.pointwise_passes += hit[i];
    if (found[i]) rep.candidates.push_back(*found[i]);
  }
  return rep;
}

struct TransferBlock {
  std::size_t block = 0;
  bool checked = false;  // false when the complementary blocks have total dimension < 2
  bool floquet_isospectral = false;
  GaussianRational constant;
};

struct TransferReport {
  bool v_separable = false;
  std::vector<TransferBlock> blocks;
  bool holds() const {
    return v_separable && std::all_of(blocks.begin(), blocks.end(), [](const TransferBlock& b) { return !b.checked || b.floquet_isospectral; });
  }
};

/// Given a Fermi isospectral pair (checked at lambda0) with Y separable for `partition`: reports
/// whether V is separable for the same partition and, for each block whose complement has
/// dimension >= 2, whether V_b + c and Y_b are Floquet isospectral with c = [Y_b] - [V_b].
inline TransferReport separability_transfer_check(const IsoPair& pair, const Partition& partition,
                                                  const GaussianRational& lambda0) {
  const auto ys = is_separable(pair.y, partition);
  if (!ys.separable) throw std::invalid_argument("Y is not separable for the requested partition");
  if (!fermi_isospectral(pair.v, pair.y, lambda0)) throw std::invalid_argument("pair is not Fermi isospectral at lambda0");
  TransferReport rep;
  const auto vs = is_separable(pair.v, partition);
  rep.v_separable = vs.separable;
  if (!vs.separable) return rep;
  const int d = pair.v.dim();
  for (std::size_t b = 0; b < partition.size(); ++b) {
    TransferBlock tb;
    tb.block = b;
    tb.checked = d - partition[b] >= 2;
    if (tb.checked) {
      tb.constant = average_exact(ys.parts[b]) - average_exact(vs.parts[b]);
      tb.floquet_isospectral = floquet_isospectral(shifted(vs.parts[b], tb.constant), ys.parts[b]);
    }
    rep.blocks.push_back(tb);
  }
  return rep;
}

}  // namespace fermikit
