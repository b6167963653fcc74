#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fermikit/lattice.hpp"
#include "fermikit/parallel.hpp"
#include "fermikit/spectral.hpp"

namespace fermikit {

/// Decaying perturbation v(n) on Z^d.
struct DecayProfile {
  enum class Kind { none, single_site, super_exponential, exponential, power_law };
  Kind kind = Kind::none;
  double amplitude = 0.0;  // signed; |amplitude| is the constant C
  double rate = 1.0;       // gamma for super-exponential and exponential
  double exponent = 1.0;   // K for power law

  static DecayProfile none() { return {}; }
  /// v(0) = a, zero elsewhere.
  static DecayProfile single_site(double a) { return {Kind::single_site, a, 1.0, 1.0}; }
  /// a exp(-|n|^gamma).
  static DecayProfile super_exponential(double a, double gamma) {
    if (gamma <= 0) throw std::invalid_argument("decay rate must be positive");
    return {Kind::super_exponential, a, gamma, 1.0};
  }
  /// a exp(-gamma |n|).
  static DecayProfile exponential(double a, double gamma) {
    if (gamma <= 0) throw std::invalid_argument("decay rate must be positive");
    return {Kind::exponential, a, gamma, 1.0};
  }
  /// a / (1 + |n|)^K.
  static DecayProfile power_law(double a, double k) {
    if (k <= 0) throw std::invalid_argument("power-law exponent must be positive");
    return {Kind::power_law, a, 1.0, k};
  }

  /// Super-exponential with gamma > 1: the regime where in-band eigenvalues are ruled out.
  bool fast_decay() const { return kind == Kind::super_exponential && rate > 1.0; }

  double at(const Site& n) const {
    double r2 = 0.0;
    for (int x : n) r2 += double(x) * double(x);
    const double r = std::sqrt(r2);
    switch (kind) {
      case Kind::none: return 0.0;
      case Kind::single_site: return r2 == 0.0 ? amplitude : 0.0;
      case Kind::super_exponential: return amplitude * std::exp(-std::pow(r, rate));
      case Kind::exponential: return amplitude * std::exp(-rate * r);
      case Kind::power_law: return amplitude / std::pow(1.0 + r, exponent);
    }
    return 0.0;
  }
};

enum class Boundary { open, periodic_supercell };

inline std::string to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic-supercell"; }

/// -Delta + V + v on a box around the origin. Open boundary: sites [-L, L]^d with hops leaving
/// the box dropped. Periodic supercell: sites [-L, L - 1]^d with wrap-around hops, so the side 2L
/// is a multiple of q_j whenever L is.
struct BoxOperator {
  int L = 0;
  Boundary boundary = Boundary::open;
  int side = 0;
  std::vector<Site> sites;
  Eigen::SparseMatrix<double> matrix;
  double perturbation_sup = 0.0;
};

inline constexpr long kMaxBoxDimension = 200000;

inline BoxOperator finite_operator(const PeriodicPotential& v, const DecayProfile& pert, int L, Boundary boundary) {
  if (!v.is_real()) throw std::invalid_argument("finite operator needs a real potential");
  const PeriodSpec& p = v.periods();
  const int d = p.dim();
  int qmax = 1;
  for (int qj : p.periods()) qmax = std::max(qmax, qj);
  if (L < 2 * qmax) throw std::invalid_argument("box half-width must be at least 2 max q_j");
  BoxOperator op;
  op.L = L;
  op.boundary = boundary;
  op.side = boundary == Boundary::open ? 2 * L + 1 : 2 * L;
  if (boundary == Boundary::periodic_supercell)
    for (int qj : p.periods())
      if (op.side % qj) throw std::invalid_argument("supercell side 2L must be a multiple of every period");
  long dim = 1;
  for (int j = 0; j < d; ++j) {
    dim *= op.side;
    if (dim > kMaxBoxDimension) throw std::invalid_argument("box dimension exceeds " + std::to_string(kMaxBoxDimension));
  }
  op.sites.reserve(static_cast<std::size_t>(dim));
  for (long idx = 0; idx < dim; ++idx) {
    Site n(static_cast<std::size_t>(d));
    long rest = idx;
    for (int j = d - 1; j >= 0; --j) {
      n[static_cast<std::size_t>(j)] = static_cast<int>(rest % op.side) - L;
      rest /= op.side;
    }
    op.sites.push_back(std::move(n));
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(2 * d + 1));
  long stride = 1;
  std::vector<long> strides(static_cast<std::size_t>(d));
  for (int j = d - 1; j >= 0; --j) {
    strides[static_cast<std::size_t>(j)] = stride;
    stride *= op.side;
  }
  for (long idx = 0; idx < dim; ++idx) {
    const Site& n = op.sites[static_cast<std::size_t>(idx)];
    const double pv = pert.at(n);
    op.perturbation_sup = std::max(op.perturbation_sup, std::abs(pv));
    trip.emplace_back(idx, idx, v(n).real() + pv);
    for (int j = 0; j < d; ++j) {
      // Forward hop only; the matrix is symmetrised by adding both orientations.
      const int pos = n[static_cast<std::size_t>(j)] + L;
      long other;
      if (pos + 1 < op.side)
        other = idx + strides[static_cast<std::size_t>(j)];
      else if (boundary == Boundary::periodic_supercell)
        other = idx - static_cast<long>(op.side - 1) * strides[static_cast<std::size_t>(j)];
      else
        continue;
      trip.emplace_back(idx, other, -1.0);
      trip.emplace_back(other, idx, -1.0);
    }
  }
  op.matrix.resize(dim, dim);
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  return op;
}

enum class SpectralTag { in_band, in_gap, outside };

inline std::string to_string(SpectralTag t) {
  switch (t) {
    case SpectralTag::in_band: return "in-band";
    case SpectralTag::in_gap: return "in-gap";
    case SpectralTag::outside: return "outside";
  }
  return "";
}

inline SpectralTag classify(double x, const std::vector<Interval>& bands, double margin = 1e-8) {
  if (bands.empty()) return SpectralTag::outside;
  for (const auto& b : bands)
    if (x >= b.lo - margin && x <= b.hi + margin) return SpectralTag::in_band;
  return x > bands.front().lo && x < bands.back().hi ? SpectralTag::in_gap : SpectralTag::outside;
}

struct BoxSpectrum {
  int L = 0;
  Boundary boundary = Boundary::open;
  std::vector<double> eigenvalues;
  std::optional<Eigen::MatrixXd> eigenvectors;  // columns
  std::vector<SpectralTag> tags;
  std::vector<double> localization;  // empty without eigenvectors
  std::string solver;
};

/// Fraction of |psi|^2 on sites with max_j |n_j| <= L/4.
inline double localization_ratio(const BoxOperator& op, const Eigen::Ref<const Eigen::VectorXd>& psi) {
  const int window = op.L / 4;
  double inside = 0.0, total = 0.0;
  for (std::size_t i = 0; i < op.sites.size(); ++i) {
    const double m = psi(static_cast<Eigen::Index>(i)) * psi(static_cast<Eigen::Index>(i));
    total += m;
    bool in = true;
    for (int x : op.sites[i]) in = in && std::abs(x) <= window;
    if (in) inside += m;
  }
  return total > 0 ? inside / total : 0.0;
}

struct ShiftInvertOptions {
  std::vector<double> shifts;  // eigenvalues nearest each shift are returned
  int per_shift = 8;
  int max_iterations = 500;
  double tol = 1e-10;
};

/// Eigenpairs nearest each shift by block inverse iteration on (H - sigma)^{-1} with
/// Rayleigh-Ritz on H. Results from different shifts are merged and de-duplicated.
inline std::pair<std::vector<double>, Eigen::MatrixXd> shift_invert_eigen(const Eigen::SparseMatrix<double>& h,
                                                                          const ShiftInvertOptions& opt) {
  const Eigen::Index n = h.rows();
  std::vector<std::pair<double, Eigen::VectorXd>> found;
  Eigen::SparseMatrix<double> eye(n, n);
  eye.setIdentity();
  for (std::size_t s = 0; s < opt.shifts.size(); ++s) {
    double sigma = opt.shifts[s];
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    for (int attempt = 0; attempt < 5; ++attempt) {
      solver.compute(h - sigma * eye);
      if (solver.info() == Eigen::Success) break;
      sigma += 1e-7 * (attempt + 1);
    }
    if (solver.info() != Eigen::Success) throw std::runtime_error("shift-invert factorisation failed");
    const int k = std::min<int>(opt.per_shift, static_cast<int>(n));
    auto rng = substream(0x5eed, s);
    std::normal_distribution<double> g;
    Eigen::MatrixXd x(n, k);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    Eigen::VectorXd theta;
    Eigen::MatrixXd ritz;
    for (int it = 0; it < opt.max_iterations; ++it) {
      x = solver.solve(x);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
      x = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
      const Eigen::MatrixXd hx = h * x;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(x.transpose() * hx);
      theta = small.eigenvalues();
      ritz = x * small.eigenvectors();
      x = ritz;
      const double res = (h * ritz - ritz * theta.asDiagonal()).colwise().norm().maxCoeff();
      if (res < opt.tol * std::max(1.0, theta.cwiseAbs().maxCoeff())) break;
    }
    for (int i = 0; i < k; ++i) found.emplace_back(theta(i), ritz.col(i));
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> vals;
  std::vector<Eigen::VectorXd> vecs;
  for (auto& [val, vec] : found) {
    if (!vecs.empty() && std::abs(val - vals.back()) < 1e-9 && std::abs(vec.dot(vecs.back())) > 0.5) continue;
    vals.push_back(val);
    vecs.push_back(std::move(vec));
  }
  Eigen::MatrixXd m(n, static_cast<Eigen::Index>(vecs.size()));
  for (std::size_t i = 0; i < vecs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = vecs[i];
  return {vals, m};
}

struct BoxSolveOptions {
  bool want_vectors = true;
  long dense_limit = 2000;
  ShiftInvertOptions shift_invert;  // used above dense_limit; shifts must be given
};

/// Spectrum of a box operator: tridiagonal solver for open d = 1 boxes, dense below
/// dense_limit, shift-invert above it.
inline BoxSpectrum solve_box(const BoxOperator& op, const std::vector<Interval>& bands, const BoxSolveOptions& opt = {}) {
  BoxSpectrum out;
  out.L = op.L;
  out.boundary = op.boundary;
  const Eigen::Index n = op.matrix.rows();
  const int d = op.sites.empty() ? 0 : static_cast<int>(op.sites.front().size());
  const auto options = opt.want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  if (d == 1 && op.boundary == Boundary::open) {
    Eigen::VectorXd diag(n), sub(std::max<Eigen::Index>(n - 1, 0));
    for (Eigen::Index i = 0; i < n; ++i) diag(i) = op.matrix.coeff(i, i);
    for (Eigen::Index i = 0; i + 1 < n; ++i) sub(i) = op.matrix.coeff(i + 1, i);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, options);
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    if (opt.want_vectors) out.eigenvectors = es.eigenvectors();
    out.solver = "tridiagonal";
  } else if (n <= opt.dense_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(op.matrix), options);
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    if (opt.want_vectors) out.eigenvectors = es.eigenvectors();
    out.solver = "dense";
  } else {
    if (opt.shift_invert.shifts.empty()) throw std::invalid_argument("large boxes need shift-invert targets");
    auto [vals, vecs] = shift_invert_eigen(op.matrix, opt.shift_invert);
    out.eigenvalues = std::move(vals);
    out.eigenvectors = std::move(vecs);
    out.solver = "shift-invert";
  }
  for (double x : out.eigenvalues) out.tags.push_back(classify(x, bands));
  if (out.eigenvectors)
    for (Eigen::Index i = 0; i < out.eigenvectors->cols(); ++i) out.localization.push_back(localization_ratio(op, out.eigenvectors->col(i)));
  return out;
}

/// Spectrum of the unperturbed periodic operator, as disjoint intervals.
inline std::vector<Interval> unperturbed_spectrum(const PeriodicPotential& v, int grid = 32) {
  return spectrum_union(band_structure(v, grid));
}

/// An eigenvalue followed across the L list by nearest-neighbour matching.
struct EigenTrack {
  std::vector<int> L;
  std::vector<double> values;
  std::vector<double> localization;
  double last_drift() const { return values.size() < 2 ? std::numeric_limits<double>::infinity() : std::abs(values.back() - values[values.size() - 2]); }
};

struct EmbeddedScanReport {
  Interval band;
  std::vector<int> L;
  std::vector<int> in_band_counts;             // per L
  std::vector<double> max_in_band_localization;  // per L
  std::vector<EigenTrack> persistent_candidates;
  std::vector<EigenTrack> outside_tracks;        // eigenvalues outside the unperturbed spectrum
  bool exploratory = false;                      // perturbation outside the super-exponential regime
  std::vector<BoxSpectrum> boxes;                // eigenvectors dropped
};

namespace detail {

inline std::vector<BoxSpectrum> solve_boxes(const PeriodicPotential& v, const DecayProfile& pert, const std::vector<int>& ls,
                                            Boundary boundary, const std::vector<Interval>& bands, const BoxSolveOptions& opt) {
  std::vector<BoxSpectrum> out(ls.size());
  parallel_for(ls.size(), [&](std::size_t i) { out[i] = solve_box(finite_operator(v, pert, ls[i], boundary), bands, opt); });
  return out;
}

inline std::vector<BoxSpectrum> without_vectors(std::vector<BoxSpectrum> boxes) {
  for (auto& b : boxes) b.eigenvectors.reset();
  return boxes;
}

// Follows each seed eigenvalue of the first box through later boxes by nearest match among
// indices accepted by `keep`; a track dies when the nearest match is farther than `tol`.
template <class Keep>
std::vector<EigenTrack> follow(const std::vector<BoxSpectrum>& boxes, double tol, Keep&& keep) {
  std::vector<EigenTrack> tracks;
  if (boxes.empty()) return tracks;
  for (std::size_t i = 0; i < boxes[0].eigenvalues.size(); ++i) {
    if (!keep(boxes[0], i)) continue;
    EigenTrack t;
    t.L.push_back(boxes[0].L);
    t.values.push_back(boxes[0].eigenvalues[i]);
    t.localization.push_back(boxes[0].localization.empty() ? 0.0 : boxes[0].localization[i]);
    bool alive = true;
    for (std::size_t b = 1; b < boxes.size() && alive; ++b) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t j = 0; j < boxes[b].eigenvalues.size(); ++j) {
        if (!keep(boxes[b], j)) continue;
        const double dist = std::abs(boxes[b].eigenvalues[j] - t.values.back());
        if (dist < best) {
          best = dist;
          arg = j;
        }
      }
      if (best >= tol) {
        alive = false;
        break;
      }
      t.L.push_back(boxes[b].L);
      t.values.push_back(boxes[b].eigenvalues[arg]);
      t.localization.push_back(boxes[b].localization.empty() ? 0.0 : boxes[b].localization[arg]);
    }
    if (alive) tracks.push_back(std::move(t));
  }
  return tracks;
}

}  // namespace detail

/// In-band eigenvalues of -Delta + V + v on open boxes for each L. A persistent candidate is an
/// in-band eigenvalue whose localization ratio stays >= 0.5 at every L and whose value drifts by
/// less than tol between consecutive L. This is a finite-volume diagnostic, not a decision.
inline EmbeddedScanReport embedded_candidate_scan(const PeriodicPotential& v, const DecayProfile& pert, const Interval& band,
                                                  const std::vector<int>& ls, double tol,
                                                  const BoxSolveOptions& opt = {}) {
  if (ls.empty()) throw std::invalid_argument("need at least one box size");
  EmbeddedScanReport rep;
  rep.band = band;
  rep.L = ls;
  rep.exploratory = !pert.fast_decay();
  const auto bands = unperturbed_spectrum(v);
  const auto boxes = detail::solve_boxes(v, pert, ls, Boundary::open, bands, opt);
  auto in_band = [&](const BoxSpectrum& b, std::size_t i) { return band.contains_interior(b.eigenvalues[i]); };
  for (const auto& b : boxes) {
    int count = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < b.eigenvalues.size(); ++i)
      if (in_band(b, i)) {
        ++count;
        if (!b.localization.empty()) best = std::max(best, b.localization[i]);
      }
    rep.in_band_counts.push_back(count);
    rep.max_in_band_localization.push_back(best);
  }
  rep.persistent_candidates = detail::follow(boxes, tol, [&](const BoxSpectrum& b, std::size_t i) {
    return in_band(b, i) && !b.localization.empty() && b.localization[i] >= 0.5;
  });
  // Outside states converge fast, so they are matched with a loose tolerance and judged by drift.
  rep.outside_tracks = detail::follow(boxes, 0.1, [&](const BoxSpectrum& b, std::size_t i) { return b.tags[i] == SpectralTag::outside; });
  rep.boxes = detail::without_vectors(boxes);
  return rep;
}

struct GapTrack {
  EigenTrack track;
  Interval gap;
  bool converged = false;  // last drift < tol
  bool localized = false;  // last localization ratio > 0.9
};

struct GapReport {
  std::vector<Interval> gaps;
  std::vector<int> L;
  std::vector<GapTrack> tracks;
  Boundary boundary = Boundary::open;
  std::vector<BoxSpectrum> boxes;  // eigenvectors dropped
  /// Tracks that converge and concentrate near the origin; edge states of an open box converge
  /// but carry no mass near the origin.
  std::size_t bound_state_count() const {
    return static_cast<std::size_t>(std::count_if(tracks.begin(), tracks.end(), [](const GapTrack& t) { return t.converged && t.localized; }));
  }
};

/// Eigenvalues inside spectral gaps of V, followed across L.
inline GapReport gap_bound_states(const PeriodicPotential& v, const DecayProfile& pert, const std::vector<int>& ls, double tol,
                                  Boundary boundary = Boundary::open, const BoxSolveOptions& opt = {}) {
  if (ls.empty()) throw std::invalid_argument("need at least one box size");
  GapReport rep;
  rep.L = ls;
  rep.boundary = boundary;
  const auto bands = unperturbed_spectrum(v);
  for (std::size_t i = 0; i + 1 < bands.size(); ++i) rep.gaps.push_back({bands[i].hi, bands[i + 1].lo});
  if (rep.gaps.empty()) throw std::invalid_argument("unperturbed spectrum has no gap");
  const auto boxes = detail::solve_boxes(v, pert, ls, boundary, bands, opt);
  auto tracks = detail::follow(boxes, 0.1, [](const BoxSpectrum& b, std::size_t i) { return b.tags[i] == SpectralTag::in_gap; });
  for (auto& t : tracks) {
    GapTrack g;
    for (const auto& gap : rep.gaps)
      if (gap.contains_interior(t.values.back())) g.gap = gap;
    g.converged = t.values.size() == ls.size() && t.last_drift() < tol;
    g.localized = t.localization.back() > 0.9;
    g.track = std::move(t);
    rep.tracks.push_back(std::move(g));
  }
  rep.boxes = detail::without_vectors(boxes);
  return rep;
}

/// CSV of eigenvalue tracks: L,index,eigenvalue,classification,localization_ratio.
inline void write_box_csv(std::ostream& os, const std::vector<BoxSpectrum>& boxes) {
  const auto old_precision = os.precision(15);
  os << "L,index,eigenvalue,classification,localization_ratio\n";
  for (const auto& b : boxes)
    for (std::size_t i = 0; i < b.eigenvalues.size(); ++i) {
      os << b.L << ',' << i << ',' << b.eigenvalues[i] << ',' << to_string(b.tags[i]) << ',';
      if (!b.localization.empty()) os << b.localization[i];
      os << '\n';
    }
  os.precision(old_precision);
}

}  // namespace fermikit
