#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fermikit/gaussian_rational.hpp"

namespace fermikit {

/// A point of Z^d.
using Site = std::vector<int>;

/// Periods q = (q_1, ..., q_d) of the lattice Gamma = q_1 Z + ... + q_d Z together with the
/// fundamental domain W = {0 <= n_j < q_j} listed in lexicographic order. Every matrix index in
/// the library refers to this order.
class PeriodSpec {
 public:
  PeriodSpec() = default;

  const std::vector<int>& periods() const { return q_; }
  int period(int j) const { return q_[static_cast<std::size_t>(j)]; }
  int dim() const { return static_cast<int>(q_.size()); }
  /// Q = q_1 ... q_d.
  int volume() const { return volume_; }
  const std::vector<Site>& domain() const { return domain_; }
  const Site& site(int index) const { return domain_[static_cast<std::size_t>(index)]; }

  /// True when the periods are not pairwise coprime (only possible with the override flag).
  bool tainted() const { return tainted_; }

  /// Lexicographic index of n mod Gamma.
  int index_of(const Site& n) const {
    int idx = 0;
    for (std::size_t j = 0; j < q_.size(); ++j) {
      int r = n[j] % q_[j];
      if (r < 0) r += q_[j];
      idx = idx * q_[j] + r;
    }
    return idx;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t j = 0; j < q_.size(); ++j) os << (j ? "," : "") << q_[j];
    os << ")";
    return os.str();
  }

  friend bool operator==(const PeriodSpec& a, const PeriodSpec& b) { return a.q_ == b.q_; }
  friend bool operator!=(const PeriodSpec& a, const PeriodSpec& b) { return !(a == b); }

 private:
  friend PeriodSpec fundamental_domain(const std::vector<int>& q, bool allow_non_coprime);
  std::vector<int> q_;
  int volume_ = 0;
  std::vector<Site> domain_;
  bool tainted_ = false;
};

/// Builds the period data for q. Periods must be pairwise coprime unless allow_non_coprime is
/// set, in which case the result is marked tainted.
inline PeriodSpec fundamental_domain(const std::vector<int>& q, bool allow_non_coprime = false) {
  if (q.empty()) throw std::invalid_argument("period vector must have at least one entry");
  for (int qj : q)
    if (qj < 1) throw std::invalid_argument("periods must be positive integers");
  bool coprime = true;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i + 1; j < q.size(); ++j)
      if (std::gcd(q[i], q[j]) != 1) coprime = false;
  if (!coprime && !allow_non_coprime) {
    std::ostringstream os;
    os << "periods must be pairwise coprime (standing assumption for the irreducibility "
          "results); got (";
    for (std::size_t j = 0; j < q.size(); ++j) os << (j ? "," : "") << q[j];
    os << "). Pass the non-coprime override to proceed with tainted reports.";
    throw std::invalid_argument(os.str());
  }
  PeriodSpec spec;
  spec.q_ = q;
  spec.tainted_ = !coprime;
  long vol = 1;
  for (int qj : q) {
    vol *= qj;
    if (vol > 1'000'000) throw std::invalid_argument("fundamental domain too large");
  }
  spec.volume_ = static_cast<int>(vol);
  spec.domain_.reserve(static_cast<std::size_t>(vol));
  Site n(q.size(), 0);
  for (long k = 0; k < vol; ++k) {
    spec.domain_.push_back(n);
    for (std::size_t j = q.size(); j-- > 0;) {
      if (++n[j] < q[j]) break;
      n[j] = 0;
    }
  }
  return spec;
}

/// Gamma-periodic potential given by its values on W. Exact potentials carry Gaussian-rational
/// values; every potential carries complex-double values.
class PeriodicPotential {
 public:
  PeriodicPotential() = default;

  static PeriodicPotential exact(PeriodSpec periods, std::vector<GaussianRational> values) {
    check_size(periods, values.size());
    PeriodicPotential v;
    v.numeric_.reserve(values.size());
    for (const auto& x : values) v.numeric_.push_back(x.to_complex());
    v.exact_ = std::move(values);
    v.periods_ = std::move(periods);
    return v;
  }

  static PeriodicPotential numeric(PeriodSpec periods, std::vector<std::complex<double>> values) {
    check_size(periods, values.size());
    PeriodicPotential v;
    v.periods_ = std::move(periods);
    v.numeric_ = std::move(values);
    return v;
  }

  static PeriodicPotential zero(const PeriodSpec& periods) {
    return exact(periods, std::vector<GaussianRational>(static_cast<std::size_t>(periods.volume())));
  }
  static PeriodicPotential constant(const PeriodSpec& periods, const GaussianRational& c) {
    return exact(periods, std::vector<GaussianRational>(static_cast<std::size_t>(periods.volume()), c));
  }

  const PeriodSpec& periods() const { return periods_; }
  int dim() const { return periods_.dim(); }
  int volume() const { return periods_.volume(); }
  bool is_exact() const { return exact_.has_value(); }

  bool is_real(double tol = 0.0) const {
    if (exact_) {
      for (const auto& x : *exact_)
        if (!x.is_real()) return false;
      return true;
    }
    for (const auto& x : numeric_)
      if (std::abs(x.imag()) > tol) return false;
    return true;
  }

  const std::vector<std::complex<double>>& values() const { return numeric_; }
  const std::vector<GaussianRational>& exact_values() const {
    if (!exact_) throw std::domain_error("potential has no exact values; use the numeric pipeline");
    return *exact_;
  }

  /// V(n) for any n in Z^d via V(n) = V(n mod Gamma).
  std::complex<double> operator()(const Site& n) const {
    return numeric_[static_cast<std::size_t>(periods_.index_of(n))];
  }
  const GaussianRational& exact_at(const Site& n) const {
    return exact_values()[static_cast<std::size_t>(periods_.index_of(n))];
  }

  bool is_zero() const {
    if (exact_) {
      for (const auto& x : *exact_)
        if (!x.is_zero()) return false;
      return true;
    }
    for (const auto& x : numeric_)
      if (x != 0.0) return false;
    return true;
  }

  friend bool operator==(const PeriodicPotential& a, const PeriodicPotential& b) {
    if (a.periods_ != b.periods_) return false;
    if (a.exact_ && b.exact_) return *a.exact_ == *b.exact_;
    return a.numeric_ == b.numeric_;
  }

 private:
  static void check_size(const PeriodSpec& periods, std::size_t n) {
    if (n != static_cast<std::size_t>(periods.volume()))
      throw std::invalid_argument("potential needs exactly Q = " + std::to_string(periods.volume()) +
                                  " values, got " + std::to_string(n));
  }

  PeriodSpec periods_;
  std::optional<std::vector<GaussianRational>> exact_;
  std::vector<std::complex<double>> numeric_;
};

/// [V] = (1/Q) sum_{n in W} V(n); exact for exact potentials.
inline GaussianRational average_exact(const PeriodicPotential& v) {
  GaussianRational s;
  for (const auto& x : v.exact_values()) s += x;
  return s / GaussianRational(v.volume());
}

inline std::complex<double> average(const PeriodicPotential& v) {
  if (v.is_exact()) return average_exact(v).to_complex();
  std::complex<double> s = 0.0;
  for (const auto& x : v.values()) s += x;
  return s / double(v.volume());
}

/// Discrete Fourier coefficients hat V(l), l in W, extended Gamma-periodically.
struct FourierTable {
  PeriodSpec periods;
  std::vector<std::complex<double>> coeffs;
  /// Present when the input was exact and every q_j is in {1, 2, 4}.
  std::optional<std::vector<GaussianRational>> exact_coeffs;
  /// Set when an exact potential had to be transformed in floating point.
  bool degraded_to_float = false;

  std::complex<double> at(const Site& l) const { return coeffs[static_cast<std::size_t>(periods.index_of(l))]; }
  const GaussianRational& exact_at(const Site& l) const {
    if (!exact_coeffs) throw std::domain_error("Fourier table has no exact coefficients");
    return (*exact_coeffs)[static_cast<std::size_t>(periods.index_of(l))];
  }
};

namespace detail {

inline bool gaussian_roots_only(const PeriodSpec& p) {
  for (int q : p.periods())
    if (q != 1 && q != 2 && q != 4) return false;
  return true;
}

// (-i)^k, or i^k with sign +1.
inline GaussianRational quarter_turn(int k, int sign) {
  k = ((k * sign) % 4 + 4) % 4;
  switch (k) {
    case 0: return GaussianRational(1);
    case 1: return GaussianRational::i();
    case 2: return GaussianRational(-1);
    default: return -GaussianRational::i();
  }
}

// Phase index of exp(sign * 2 pi i sum_j l_j n_j / q_j) in quarter turns (q_j in {1,2,4}).
inline int quarter_index(const PeriodSpec& p, const Site& l, const Site& n) {
  int k = 0;
  for (int j = 0; j < p.dim(); ++j) k += l[static_cast<std::size_t>(j)] * n[static_cast<std::size_t>(j)] * (4 / p.period(j));
  return k;
}

inline double phase_angle(const PeriodSpec& p, const Site& l, const Site& n) {
  double s = 0.0;
  for (int j = 0; j < p.dim(); ++j)
    s += double(l[static_cast<std::size_t>(j)]) * double(n[static_cast<std::size_t>(j)]) / double(p.period(j));
  return 2.0 * std::numbers::pi * s;
}

}  // namespace detail

/// hat V(l) = (1/Q) sum_n V(n) exp(-2 pi i sum_j l_j n_j / q_j). Exact when possible; otherwise
/// floating point, flagged via degraded_to_float when the input itself was exact.
inline FourierTable dft(const PeriodicPotential& v) {
  const PeriodSpec& p = v.periods();
  const auto& w = p.domain();
  FourierTable t;
  t.periods = p;
  t.coeffs.resize(w.size());
  if (v.is_exact() && detail::gaussian_roots_only(p)) {
    std::vector<GaussianRational> ex(w.size());
    const GaussianRational inv_q = GaussianRational::from_ratio(1, p.volume());
    for (std::size_t l = 0; l < w.size(); ++l) {
      GaussianRational s;
      for (std::size_t n = 0; n < w.size(); ++n) {
        const auto& val = v.exact_values()[n];
        if (val.is_zero()) continue;
        s += val * detail::quarter_turn(detail::quarter_index(p, w[l], w[n]), -1);
      }
      ex[l] = s * inv_q;
      t.coeffs[l] = ex[l].to_complex();
    }
    t.exact_coeffs = std::move(ex);
    return t;
  }
  t.degraded_to_float = v.is_exact();
  for (std::size_t l = 0; l < w.size(); ++l) {
    std::complex<double> s = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) s += v.values()[n] * std::polar(1.0, -detail::phase_angle(p, w[l], w[n]));
    t.coeffs[l] = s / double(p.volume());
  }
  return t;
}

/// Inverse transform V(n) = sum_l hat V(l) exp(+2 pi i sum_j l_j n_j / q_j).
inline PeriodicPotential idft(const FourierTable& t) {
  const PeriodSpec& p = t.periods;
  const auto& w = p.domain();
  if (t.exact_coeffs) {
    std::vector<GaussianRational> vals(w.size());
    for (std::size_t n = 0; n < w.size(); ++n) {
      GaussianRational s;
      for (std::size_t l = 0; l < w.size(); ++l) {
        const auto& c = (*t.exact_coeffs)[l];
        if (c.is_zero()) continue;
        s += c * detail::quarter_turn(detail::quarter_index(p, w[l], w[n]), +1);
      }
      vals[n] = s;
    }
    return PeriodicPotential::exact(p, std::move(vals));
  }
  std::vector<std::complex<double>> vals(w.size());
  for (std::size_t n = 0; n < w.size(); ++n) {
    std::complex<double> s = 0.0;
    for (std::size_t l = 0; l < w.size(); ++l) s += t.coeffs[l] * std::polar(1.0, detail::phase_angle(p, w[l], w[n]));
    vals[n] = s;
  }
  return PeriodicPotential::numeric(p, std::move(vals));
}

/// hat V(-l) = conj(hat V(l)) for every l, up to tol.
inline bool is_conjugate_symmetric(const FourierTable& t, double tol = 1e-12) {
  for (const auto& l : t.periods.domain()) {
    Site neg(l.size());
    for (std::size_t j = 0; j < l.size(); ++j) neg[j] = -l[j];
    if (t.exact_coeffs) {
      if (t.exact_at(neg) != t.exact_at(l).conj()) return false;
    } else if (std::abs(t.at(neg) - std::conj(t.at(l))) > tol) {
      return false;
    }
  }
  return true;
}

/// Block sizes (d_1, ..., d_r) with sum d.
using Partition = std::vector<int>;

namespace detail {

inline void check_partition(const Partition& partition, int d) {
  int s = 0;
  for (int b : partition) {
    if (b < 1) throw std::invalid_argument("partition blocks must be positive");
    s += b;
  }
  if (s != d)
    throw std::invalid_argument("partition sums to " + std::to_string(s) + " but the dimension is " + std::to_string(d));
}

inline std::vector<int> block_offsets(const Partition& partition) {
  std::vector<int> off{0};
  for (int b : partition) off.push_back(off.back() + b);
  return off;
}

inline Site block_of(const Site& n, int begin, int end) { return Site(n.begin() + begin, n.begin() + end); }

}  // namespace detail

/// V(n) = sum_j V_j(block_j(n)) for potentials V_j living on consecutive coordinate blocks.
inline PeriodicPotential direct_sum(const std::vector<PeriodicPotential>& parts, const Partition& partition,
                                    bool allow_non_coprime = false) {
  if (parts.size() != partition.size()) throw std::invalid_argument("one part per partition block required");
  std::vector<int> q;
  bool exact = true, tainted = false;
  for (std::size_t j = 0; j < parts.size(); ++j) {
    if (parts[j].dim() != partition[j])
      throw std::invalid_argument("part " + std::to_string(j) + " has dimension " + std::to_string(parts[j].dim()) +
                                  ", block expects " + std::to_string(partition[j]));
    for (int qj : parts[j].periods().periods()) q.push_back(qj);
    exact = exact && parts[j].is_exact();
    tainted = tainted || parts[j].periods().tainted();
  }
  const PeriodSpec spec = fundamental_domain(q, allow_non_coprime || tainted);
  const auto off = detail::block_offsets(partition);
  const auto& w = spec.domain();
  if (exact) {
    std::vector<GaussianRational> vals(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      for (std::size_t j = 0; j < parts.size(); ++j) vals[i] += parts[j].exact_at(detail::block_of(w[i], off[j], off[j + 1]));
    return PeriodicPotential::exact(spec, std::move(vals));
  }
  std::vector<std::complex<double>> vals(w.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < parts.size(); ++j) vals[i] += parts[j](detail::block_of(w[i], off[j], off[j + 1]));
  return PeriodicPotential::numeric(spec, std::move(vals));
}

struct SeparabilityResult {
  bool separable = false;
  /// Witness parts on each block; parts after the first have mean zero. Empty when not separable.
  std::vector<PeriodicPotential> parts;
  /// "exact-projection" or "fourier-support".
  std::string method;
};

namespace detail {

inline PeriodSpec block_spec(const PeriodSpec& p, int begin, int end) {
  std::vector<int> q(p.periods().begin() + begin, p.periods().begin() + end);
  return fundamental_domain(q, true);
}

// Averages over the coordinates outside [begin, end): the map V -> E_{-j} V.
template <class T, class Get>
std::vector<T> marginal(const PeriodSpec& p, const PeriodSpec& blk, int begin, int end, Get get) {
  std::vector<T> acc(static_cast<std::size_t>(blk.volume()), T{});
  const auto& w = p.domain();
  for (std::size_t i = 0; i < w.size(); ++i) acc[static_cast<std::size_t>(blk.index_of(block_of(w[i], begin, end)))] += get(i);
  return acc;
}

}  // namespace detail

/// Fourier-support form of separability: hat V(l) vanishes (|.| <= tol) whenever l has nonzero
/// entries (mod Gamma) in more than one block.
inline bool fourier_support_separable(const PeriodicPotential& v, const Partition& partition, double tol = 1e-10) {
  detail::check_partition(partition, v.dim());
  const auto off = detail::block_offsets(partition);
  const FourierTable t = dft(v);
  const auto& p = v.periods();
  for (std::size_t i = 0; i < p.domain().size(); ++i) {
    const Site& l = p.domain()[i];
    int touched = 0;
    for (std::size_t b = 0; b + 1 < off.size(); ++b) {
      bool nz = false;
      for (int j = off[b]; j < off[b + 1]; ++j) nz = nz || l[static_cast<std::size_t>(j)] != 0;
      touched += nz ? 1 : 0;
    }
    if (touched <= 1) continue;
    if (t.exact_coeffs ? !(*t.exact_coeffs)[i].is_zero() : std::abs(t.coeffs[i]) > tol) return false;
  }
  return true;
}

/// Decides whether V = V_1 + ... + V_r over the blocks of `partition`. Exact potentials are
/// decided exactly by projecting onto block marginals (equivalent to the Fourier support
/// condition); numeric potentials use the Fourier support test with tolerance tol.
inline SeparabilityResult is_separable(const PeriodicPotential& v, const Partition& partition, double tol = 1e-10) {
  detail::check_partition(partition, v.dim());
  const auto off = detail::block_offsets(partition);
  const PeriodSpec& p = v.periods();
  const auto& w = p.domain();
  SeparabilityResult res;
  if (v.is_exact()) {
    res.method = "exact-projection";
    const GaussianRational mean = average_exact(v);
    std::vector<PeriodicPotential> parts;
    for (std::size_t b = 0; b < partition.size(); ++b) {
      const PeriodSpec blk = detail::block_spec(p, off[b], off[b + 1]);
      auto m = detail::marginal<GaussianRational>(p, blk, off[b], off[b + 1],
                                                  [&](std::size_t i) { return v.exact_values()[i]; });
      const GaussianRational scale = GaussianRational::from_ratio(blk.volume(), p.volume());
      for (auto& x : m) {
        x *= scale;
        if (b > 0) x -= mean;
      }
      parts.push_back(PeriodicPotential::exact(blk, std::move(m)));
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      GaussianRational s;
      for (std::size_t b = 0; b < parts.size(); ++b) s += parts[b].exact_at(detail::block_of(w[i], off[b], off[b + 1]));
      if (s != v.exact_values()[i]) return res;
    }
    res.separable = true;
    res.parts = std::move(parts);
    return res;
  }
  res.method = "fourier-support";
  if (!fourier_support_separable(v, partition, tol)) return res;
  const std::complex<double> mean = average(v);
  for (std::size_t b = 0; b < partition.size(); ++b) {
    const PeriodSpec blk = detail::block_spec(p, off[b], off[b + 1]);
    auto m = detail::marginal<std::complex<double>>(p, blk, off[b], off[b + 1], [&](std::size_t i) { return v.values()[i]; });
    for (auto& x : m) {
      x *= double(blk.volume()) / double(p.volume());
      if (b > 0) x -= mean;
    }
    res.parts.push_back(PeriodicPotential::numeric(blk, std::move(m)));
  }
  res.separable = true;
  return res;
}

/// n -> V(n + shift).
inline PeriodicPotential translated(const PeriodicPotential& v, const Site& shift) {
  const auto& w = v.periods().domain();
  Site m(shift.size());
  auto at = [&](const Site& n) {
    for (std::size_t j = 0; j < n.size(); ++j) m[j] = n[j] + shift[j];
    return v.periods().index_of(m);
  };
  if (v.is_exact()) {
    std::vector<GaussianRational> vals;
    for (const auto& n : w) vals.push_back(v.exact_values()[static_cast<std::size_t>(at(n))]);
    return PeriodicPotential::exact(v.periods(), std::move(vals));
  }
  std::vector<std::complex<double>> vals;
  for (const auto& n : w) vals.push_back(v.values()[static_cast<std::size_t>(at(n))]);
  return PeriodicPotential::numeric(v.periods(), std::move(vals));
}

/// n -> V(n') where n'_j = -n_j on the flagged axes (all axes when `axes` is empty).
inline PeriodicPotential reflected(const PeriodicPotential& v, const std::vector<bool>& axes = {}) {
  const auto& w = v.periods().domain();
  Site m;
  auto at = [&](const Site& n) {
    m = n;
    for (std::size_t j = 0; j < n.size(); ++j)
      if (axes.empty() || axes[j]) m[j] = -n[j];
    return v.periods().index_of(m);
  };
  if (v.is_exact()) {
    std::vector<GaussianRational> vals;
    for (const auto& n : w) vals.push_back(v.exact_values()[static_cast<std::size_t>(at(n))]);
    return PeriodicPotential::exact(v.periods(), std::move(vals));
  }
  std::vector<std::complex<double>> vals;
  for (const auto& n : w) vals.push_back(v.values()[static_cast<std::size_t>(at(n))]);
  return PeriodicPotential::numeric(v.periods(), std::move(vals));
}

/// V + c, pointwise.
inline PeriodicPotential shifted(const PeriodicPotential& v, const GaussianRational& c) {
  std::vector<GaussianRational> vals = v.exact_values();
  for (auto& x : vals) x += c;
  return PeriodicPotential::exact(v.periods(), std::move(vals));
}

}  // namespace fermikit
