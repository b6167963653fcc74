// fermikit: command-line front end for the periodic Schrodinger operator library.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fermikit/fermikit.hpp"

namespace {

using namespace fermikit;
using Json = nlohmann::ordered_json;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

/// Ordered key/value report printed as "key: value" lines, optionally also written as JSON.
class Report {
 public:
  Report(const std::string& command, std::uint64_t seed, const PeriodSpec& periods) {
    body_["tool"] = "fermikit";
    body_["version"] = version();
    body_["command"] = command;
    body_["seed"] = seed;
    body_["periods"] = periods.periods();
    if (periods.tainted()) body_["tainted"] = true;
  }

  template <class T>
  void set(const std::string& key, const T& value) {
    body_[key] = value;
  }
  Json& operator[](const std::string& key) { return body_[key]; }

  void emit(std::ostream& os, const std::string& json_path) const {
    for (const auto& [key, value] : body_.items()) os << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    if (!json_path.empty()) {
      std::ofstream out(json_path);
      if (!out) throw std::runtime_error("cannot write " + json_path);
      out << body_.dump(2) << '\n';
    }
  }

 private:
  Json body_ = Json::object();
};

std::string exact_text(const GaussianRational& x) {
  if (x.imag() == 0) return x.real().get_str();
  return x.to_string();
}

GaussianRational parse_lambda(const std::string& text) {
  try {
    return parse_gaussian(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument("malformed --lambda '" + text + "': " + e.what());
  }
}

Json interval_json(const Interval& b) { return Json::array({b.lo, b.hi}); }

Json intervals_json(const std::vector<Interval>& v) {
  Json out = Json::array();
  for (const auto& b : v) out.push_back(interval_json(b));
  return out;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

// ---------------------------------------------------------------- poly

struct PolyArgs {
  std::string input, lambda, output;
};

int run_poly(const PolyArgs& a) {
  const auto v = load_potential_spec(a.input);
  const ExactPoly p = a.lambda.empty() ? characteristic_polynomial(v) : characteristic_polynomial_at(v, parse_lambda(a.lambda));
  std::ofstream file;
  open_output(a.output, file) << to_text(p);
  return kPass;
}

// ---------------------------------------------------------------- bands

struct BandsArgs {
  std::string input, output, json;
  int grid = 32;
};

int run_bands(const BandsArgs& a) {
  const auto v = load_potential_spec(a.input);
  const auto bs = band_structure(v, a.grid);
  std::ofstream file;
  write_sheets_csv(open_output(a.output, file), bs);
  Report rep("bands", 0, v.periods());
  rep.set("grid", a.grid);
  rep.set("extents", intervals_json(bs.extents));
  rep.set("spectrum", intervals_json(spectrum_union(bs)));
  // The CSV owns stdout unless it went to a file.
  rep.emit(a.output.empty() || a.output == "-" ? std::cerr : std::cout, a.json);
  return kPass;
}

// ---------------------------------------------------------------- irreducible

struct IrreducibleArgs {
  std::string input, lambda, backend = "modular", json;
  bool bloch = false;
  int trials = 5;
  std::uint64_t seed = 1;
  std::optional<int> expect;
};

FactorCountOptions count_options(int trials, std::uint64_t seed, const std::string& backend) {
  FactorCountOptions opt;
  opt.trials = trials;
  opt.seed = seed;
  if (backend == "exact")
    opt.backend = CountBackend::exact;
  else if (backend == "modular")
    opt.backend = CountBackend::modular;
  else
    throw std::invalid_argument("unknown backend '" + backend + "'");
  return opt;
}

void put_factor_report(Report& rep, const FactorReport& r) {
  rep.set("count", r.count);
  rep.set("distinct", r.distinct);
  rep.set("method", r.method);
  rep.set("backend", r.backend);
  rep.set("trials", r.trials);
  rep.set("rejected_slices", r.rejected_slices);
  rep.set("slice_counts", r.slice_counts);
  rep.set("agreement", r.agreement);
  rep.set("confident", r.confident);
}

int run_irreducible(const IrreducibleArgs& a) {
  if (a.bloch == !a.lambda.empty()) throw std::invalid_argument("give exactly one of --lambda or --bloch");
  const auto v = load_potential_spec(a.input);
  const auto opt = count_options(a.trials, a.seed, a.backend);
  Report rep("irreducible", a.seed, v.periods());
  FactorReport r;
  if (a.bloch) {
    rep.set("variety", "bloch");
    r = bloch_factor_count(v, opt);
  } else {
    const auto l0 = parse_lambda(a.lambda);
    rep.set("variety", "fermi");
    rep.set("lambda0", exact_text(l0));
    r = fermi_factor_count(v, l0, opt);
  }
  put_factor_report(rep, r);
  int code = kPass;
  if (a.expect) {
    rep.set("expected", *a.expect);
    code = r.count == *a.expect ? kPass : kFail;
    rep.set("result", code == kPass ? "pass" : "fail");
  }
  rep.emit(std::cout, a.json);
  return code;
}

// ---------------------------------------------------------------- isospec

struct IsospecArgs {
  std::vector<std::string> inputs;
  std::string lambda, json;
  int samples = 50;
  std::uint64_t seed = 1;
};

int run_isospec(const IsospecArgs& a) {
  if (a.inputs.size() != 2) throw std::invalid_argument("isospec needs exactly two --input documents");
  const auto v = load_potential_spec(a.inputs[0]), y = load_potential_spec(a.inputs[1]);
  Report rep("isospec", a.seed, v.periods());
  const bool floquet = floquet_isospectral(v, y);
  rep.set("floquet_isospectral", floquet);
  rep.set("means_equal", average_exact(v) == average_exact(y));
  bool pass = floquet;
  if (!a.lambda.empty()) {
    const auto l0 = parse_lambda(a.lambda);
    rep.set("lambda0", exact_text(l0));
    const bool fermi = fermi_isospectral(v, y, l0);
    rep.set("fermi_isospectral", fermi);
    pass = fermi;
    if (fermi && v.is_real() && y.is_real()) {
      const auto inv = verify_isospectral_invariants(v, y, l0, a.samples, a.seed);
      rep.set("pole_sum_samples", inv.samples);
      rep.set("pole_sum_max_relative_error", inv.max_relative_error);
      rep.set("pole_sums_agree", inv.sums_agree);
      pass = pass && inv.passed();
    }
  }
  rep.set("result", pass ? "pass" : "fail");
  rep.emit(std::cout, a.json);
  return pass ? kPass : kFail;
}

// ---------------------------------------------------------------- perturb

struct PerturbArgs {
  std::string input, mode = "embedded", decay = "superexp", boundary = "open", band, output, json;
  double amplitude = -3.0, rate = 1.5, exponent = 2.0, tol = 1e-8;
  std::vector<int> ls{100, 200, 400, 800};
};

DecayProfile make_profile(const PerturbArgs& a) {
  if (a.decay == "none") return DecayProfile::none();
  if (a.decay == "site") return DecayProfile::single_site(a.amplitude);
  if (a.decay == "superexp") return DecayProfile::super_exponential(a.amplitude, a.rate);
  if (a.decay == "exp") return DecayProfile::exponential(a.amplitude, a.rate);
  if (a.decay == "power") return DecayProfile::power_law(a.amplitude, a.exponent);
  throw std::invalid_argument("unknown --decay '" + a.decay + "'");
}

Json track_json(const EigenTrack& t) {
  return Json{{"L", t.L}, {"values", t.values}, {"localization", t.localization}};
}

int run_perturb(const PerturbArgs& a) {
  const auto v = load_potential_spec(a.input);
  const auto prof = make_profile(a);
  Report rep("perturb", 0, v.periods());
  rep.set("mode", a.mode);
  rep.set("decay", a.decay);
  rep.set("amplitude", a.amplitude);
  rep.set("L", a.ls);
  rep.set("tol", a.tol);
  std::vector<BoxSpectrum> boxes;
  int code = kPass;
  if (a.mode == "embedded") {
    std::vector<Interval> bands = unperturbed_spectrum(v);
    if (!a.band.empty()) {
      const auto comma = a.band.find(',');
      if (comma == std::string::npos) throw std::invalid_argument("--band expects lo,hi");
      bands = {{std::stod(a.band.substr(0, comma)), std::stod(a.band.substr(comma + 1))}};
    }
    Json scans = Json::array();
    std::size_t candidates = 0;
    for (const auto& b : bands) {
      const auto r = embedded_candidate_scan(v, prof, b, a.ls, a.tol);
      Json s{{"band", interval_json(b)}, {"in_band_counts", r.in_band_counts}, {"max_in_band_localization", r.max_in_band_localization}};
      Json cand = Json::array(), outside = Json::array();
      for (const auto& t : r.persistent_candidates) cand.push_back(track_json(t));
      for (const auto& t : r.outside_tracks) outside.push_back(track_json(t));
      s["persistent_candidates"] = cand;
      s["outside_tracks"] = outside;
      scans.push_back(s);
      rep.set("exploratory", r.exploratory);
      candidates += r.persistent_candidates.size();
      if (boxes.empty()) boxes = r.boxes;
    }
    rep.set("scans", scans);
    rep.set("persistent_candidates", candidates);
    code = candidates == 0 ? kPass : kFail;
  } else if (a.mode == "gap") {
    Boundary boundary;
    if (a.boundary == "open")
      boundary = Boundary::open;
    else if (a.boundary == "supercell")
      boundary = Boundary::periodic_supercell;
    else
      throw std::invalid_argument("unknown --boundary '" + a.boundary + "'");
    const auto r = gap_bound_states(v, prof, a.ls, a.tol, boundary);
    rep.set("boundary", to_string(boundary));
    rep.set("gaps", intervals_json(r.gaps));
    Json tracks = Json::array();
    for (const auto& t : r.tracks) {
      Json j = track_json(t.track);
      j["converged"] = t.converged;
      j["localized"] = t.localized;
      tracks.push_back(j);
    }
    rep.set("tracks", tracks);
    rep.set("bound_states", r.bound_state_count());
    boxes = r.boxes;
  } else {
    throw std::invalid_argument("unknown --mode '" + a.mode + "'");
  }
  if (!a.output.empty()) {
    std::ofstream file;
    write_box_csv(open_output(a.output, file), boxes);
  }
  rep.set("result", code == kPass ? "pass" : "fail");
  rep.emit(std::cout, a.json);
  return code;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string suite, json, backend = "modular";
  std::vector<std::string> inputs, lambdas;
  std::vector<double> energies;
  int samples = 100, trials = 5, grid = 16;
  std::uint64_t seed = 1;
};

const std::map<std::string, std::string>& suite_aliases() {
  static const std::map<std::string, std::string> m{
      {"fourier-equivalence", "fourier-equivalence"}, {"lesep", "fourier-equivalence"},
      {"zero-reference", "zero-reference"},           {"gtp1", "zero-reference"},
      {"lowest-degree", "lowest-degree"},             {"hom", "lowest-degree"},
      {"hom1", "lowest-degree"},                      {"hom2", "lowest-degree"},
      {"highest-degree", "highest-degree"},           {"fermi-irreducible", "fermi-irreducible"},
      {"thm2", "fermi-irreducible"},                  {"gcf", "fermi-irreducible"},
      {"bloch-irreducible", "bloch-irreducible"},     {"isospectral-invariants", "isospectral-invariants"},
      {"key11", "isospectral-invariants"},            {"band-interior", "band-interior"},
      {"enot0", "band-interior"},                     {"Enot0", "band-interior"},
  };
  return m;
}

int run_verify(const VerifyArgs& a) {
  const auto it = suite_aliases().find(a.suite);
  if (it == suite_aliases().end()) throw std::invalid_argument("unknown suite '" + a.suite + "'");
  const std::string suite = it->second;
  const std::size_t wanted = suite == "isospectral-invariants" ? 2 : 1;
  if (a.inputs.size() != wanted)
    throw std::invalid_argument("suite " + suite + " needs " + std::to_string(wanted) + " --input document(s)");
  const auto v = load_potential_spec(a.inputs[0]);
  Report rep("verify", a.seed, v.periods());
  rep.set("suite", suite);
  bool pass = false;

  if (suite == "fourier-equivalence") {
    const auto r = verify_fourier_equivalence(v, a.samples, 1e-10, a.seed);
    rep.set("samples", r.samples);
    rep.set("max_eigenvalue_error", r.max_eigenvalue_error);
    rep.set("max_determinant_error", r.max_determinant_error);
    pass = r.passed;
  } else if (suite == "zero-reference") {
    const auto& p = v.periods();
    pass = zero_potential_reference(p).polynomial == characteristic_polynomial(PeriodicPotential::zero(p));
    Json at = Json::array();
    for (const auto& l : a.lambdas) {
      const auto l0 = parse_lambda(l);
      const bool ok = zero_potential_reference(p, l0).polynomial == characteristic_polynomial_at(PeriodicPotential::zero(p), l0);
      at.push_back({{"lambda0", exact_text(l0)}, {"equal", ok}});
      pass = pass && ok;
    }
    rep.set("full_polynomial_equal", pass);
    if (!at.empty()) rep.set("at_energies", at);
  } else if (suite == "lowest-degree") {
    const auto r = lowest_component_check(v, a.samples, a.seed);
    rep.set("numeric_error", r.numeric_error);
    if (!r.detail.empty()) rep.set("detail", r.detail);
    pass = r.ok;
  } else if (suite == "highest-degree") {
    const auto r = check_highest_degree(characteristic_polynomial(v), v.periods());
    if (!r.detail.empty()) rep.set("detail", r.detail);
    pass = r.ok;
  } else if (suite == "fermi-irreducible") {
    const auto opt = count_options(a.trials, a.seed, a.backend);
    const GaussianRational mean = average_exact(v);
    std::vector<GaussianRational> energies;
    for (const auto& l : a.lambdas) energies.push_back(parse_lambda(l));
    if (energies.empty()) energies = {mean, mean + GaussianRational(1), GaussianRational::from_ratio(-7, 3)};
    const bool constant = std::all_of(v.exact_values().begin(), v.exact_values().end(), [&](const GaussianRational& x) { return x == mean; });
    const auto zero_body = [&] { return unit_normalize(characteristic_polynomial_at(PeriodicPotential::zero(v.periods()), 0)).body; };
    Json runs = Json::array();
    pass = true;
    for (const auto& l0 : energies) {
      const auto r = fermi_factor_count(v, l0, opt);
      Json j{{"lambda0", exact_text(l0)}, {"count", r.count}, {"method", r.method}, {"agreement", r.agreement}, {"slice_counts", r.slice_counts}};
      bool ok = r.confident;
      if (l0 == mean && v.dim() == 2) {
        // At the mean in d = 2 the count is 1 or 2; two factors come with the zero-potential body.
        const bool body_zero = unit_normalize(characteristic_polynomial_at(v, l0)).body == zero_body();
        j["body_equals_zero_body"] = body_zero;
        if (constant) ok = ok && r.count == 2 && body_zero;
        else ok = ok && (r.count == 1 || (r.count == 2 && body_zero));
        if (!constant && r.count == 2) j["note"] = "nonconstant potential with two factors at the mean";
      } else {
        ok = ok && r.count == 1;
      }
      j["ok"] = ok;
      pass = pass && ok;
      runs.push_back(j);
    }
    rep.set("runs", runs);
  } else if (suite == "bloch-irreducible") {
    const auto r = bloch_factor_count(v, count_options(a.trials, a.seed, a.backend));
    put_factor_report(rep, r);
    pass = r.count == 1 && r.confident;
  } else if (suite == "isospectral-invariants") {
    const auto y = load_potential_spec(a.inputs[1]);
    const GaussianRational l0 = a.lambdas.empty() ? GaussianRational(0) : parse_lambda(a.lambdas.front());
    rep.set("lambda0", exact_text(l0));
    const bool fermi = fermi_isospectral(v, y, l0);
    rep.set("fermi_isospectral", fermi);
    if (fermi) {
      const auto r = verify_isospectral_invariants(v, y, l0, a.samples, a.seed);
      rep.set("means_equal", r.means_equal);
      rep.set("samples", r.samples);
      rep.set("max_relative_error", r.max_relative_error);
      pass = r.passed();
    }
  } else if (suite == "band-interior") {
    const auto& p = v.periods();
    if (p.dim() < 2) throw std::invalid_argument("band-interior suite needs d >= 2");
    std::vector<double> energies = a.energies;
    if (energies.empty()) energies = {-3.9, -1.0, 0.0, 1.5, 3.9, 4.1, -4.1};
    bool some_odd = false;
    for (int qj : p.periods()) some_odd = some_odd || qj % 2 == 1;
    const double edge = 2.0 * p.dim();
    Json runs = Json::array();
    pass = true;
    for (double l : energies) {
      const bool got = in_band_interior(p, l, a.grid);
      const bool expect = std::abs(l) < edge && (l != 0.0 || some_odd);
      runs.push_back({{"lambda", l}, {"interior", got}, {"expected", expect}});
      pass = pass && got == expect;
    }
    rep.set("energies", runs);
  }
  rep.set("result", pass ? "pass" : "fail");
  rep.emit(std::cout, a.json);
  return pass ? kPass : kFail;
}

int guarded(const std::function<int()>& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    std::cerr << "fermikit: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "fermikit: " << e.what() << '\n';
    return kFail;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and numerical spectral tools for discrete periodic Schrodinger operators"};
  app.set_version_flag("--version", std::string(fermikit::version()));
  app.require_subcommand(1);
  std::function<int()> action;

  PolyArgs poly;
  auto* sp = app.add_subcommand("poly", "Print the characteristic Laurent polynomial");
  sp->add_option("--input", poly.input, "Potential spec (JSON)")->required()->check(CLI::ExistingFile);
  sp->add_option("--lambda", poly.lambda, "Fix the energy, e.g. 1/2 or (1/2,-3)");
  sp->add_option("--output", poly.output, "Output file (default stdout)");
  sp->callback([&] { action = [&] { return run_poly(poly); }; });

  BandsArgs bands;
  auto* sb = app.add_subcommand("bands", "Band sheets as CSV, extents and spectrum as a report");
  sb->add_option("--input", bands.input, "Potential spec (JSON)")->required()->check(CLI::ExistingFile);
  sb->add_option("--grid", bands.grid, "Grid points per axis (>= 8)")->capture_default_str();
  sb->add_option("--output", bands.output, "CSV file (default stdout)");
  sb->add_option("--json", bands.json, "Also write the report as JSON");
  sb->callback([&] { action = [&] { return run_bands(bands); }; });

  IrreducibleArgs irr;
  auto* si = app.add_subcommand("irreducible", "Count absolutely irreducible factors of a Fermi or Bloch polynomial");
  si->add_option("--input", irr.input, "Potential spec (JSON)")->required()->check(CLI::ExistingFile);
  si->add_option("--lambda", irr.lambda, "Energy of the Fermi polynomial");
  si->add_flag("--bloch", irr.bloch, "Count factors of the full polynomial in (z, lambda)");
  si->add_option("--trials", irr.trials, "Random slices (>= 5)")->capture_default_str();
  si->add_option("--seed", irr.seed, "Seed")->capture_default_str();
  si->add_option("--backend", irr.backend, "modular or exact")->capture_default_str();
  si->add_option("--expect", irr.expect, "Exit 1 unless the count equals this value");
  si->add_option("--json", irr.json, "Also write the report as JSON");
  si->callback([&] { action = [&] { return run_irreducible(irr); }; });

  IsospecArgs iso;
  auto* ss = app.add_subcommand("isospec", "Compare two potentials for Floquet or Fermi isospectrality");
  ss->add_option("--input", iso.inputs, "Potential spec (JSON); give twice")->required()->check(CLI::ExistingFile);
  ss->add_option("--lambda", iso.lambda, "Energy for the Fermi comparison");
  ss->add_option("--samples", iso.samples, "Sample points for the pole-sum identity")->capture_default_str();
  ss->add_option("--seed", iso.seed, "Seed")->capture_default_str();
  ss->add_option("--json", iso.json, "Also write the report as JSON");
  ss->callback([&] { action = [&] { return run_isospec(iso); }; });

  PerturbArgs pert;
  auto* sq = app.add_subcommand("perturb", "Finite-box experiments with a decaying perturbation");
  sq->add_option("--input", pert.input, "Periodic background potential (JSON)")->required()->check(CLI::ExistingFile);
  sq->add_option("--mode", pert.mode, "embedded or gap")->capture_default_str();
  sq->add_option("--decay", pert.decay, "none, site, superexp, exp or power")->capture_default_str();
  sq->add_option("--amplitude", pert.amplitude, "Signed amplitude of v")->capture_default_str();
  sq->add_option("--rate", pert.rate, "Decay rate gamma")->capture_default_str();
  sq->add_option("--exponent", pert.exponent, "Power-law exponent")->capture_default_str();
  sq->add_option("--L", pert.ls, "Box half-widths")->delimiter(',')->capture_default_str();
  sq->add_option("--tol", pert.tol, "Drift tolerance between consecutive L")->capture_default_str();
  sq->add_option("--band", pert.band, "Band to scan as lo,hi (default: every band)");
  sq->add_option("--boundary", pert.boundary, "open or supercell (gap mode)")->capture_default_str();
  sq->add_option("--output", pert.output, "CSV of box spectra");
  sq->add_option("--json", pert.json, "Also write the report as JSON");
  sq->callback([&] { action = [&] { return run_perturb(pert); }; });

  VerifyArgs ver;
  auto* sv = app.add_subcommand("verify", "Run a named verification suite");
  std::string suites;
  for (const auto& [name, target] : suite_aliases())
    if (name == target) suites += (suites.empty() ? "" : ", ") + name;
  sv->add_option("--suite", ver.suite, "One of: " + suites)->required();
  sv->add_option("--input", ver.inputs, "Potential spec (JSON)")->check(CLI::ExistingFile);
  sv->add_option("--lambda", ver.lambdas, "Energies (repeatable)");
  sv->add_option("--energies", ver.energies, "Real energies for band-interior")->delimiter(',');
  sv->add_option("--samples", ver.samples, "Sample points")->capture_default_str();
  sv->add_option("--trials", ver.trials, "Random slices")->capture_default_str();
  sv->add_option("--grid", ver.grid, "Band grid for band-interior")->capture_default_str();
  sv->add_option("--seed", ver.seed, "Seed")->capture_default_str();
  sv->add_option("--backend", ver.backend, "modular or exact")->capture_default_str();
  sv->add_option("--json", ver.json, "Also write the report as JSON");
  sv->callback([&] { action = [&] { return run_verify(ver); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  return guarded(action);
}
