#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fermikit/lattice.hpp"

namespace fermikit {

/// Malformed potential-spec document.
struct SpecError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

using json = nlohmann::json;

inline void only_fields(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw SpecError(where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw SpecError(where + ": unknown field '" + key + "'");
}

inline const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw SpecError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline long integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SpecError(where + ": expected an integer, got " + j.dump());
  return j.get<long>();
}

inline mpq_class ratio(const json& p, const json& q, const std::string& where) {
  const long num = integer(p, where), den = integer(q, where);
  if (den == 0) throw SpecError(where + ": zero denominator");
  mpq_class r(num, den);
  r.canonicalize();
  return r;
}

/// [p, q] or [re_p, re_q, im_p, im_q].
inline GaussianRational exact_value(const json& j, const std::string& where) {
  if (!j.is_array() || (j.size() != 2 && j.size() != 4))
    throw SpecError(where + ": rational must be [p,q] or [re_p,re_q,im_p,im_q], got " + j.dump());
  if (j.size() == 2) return GaussianRational(ratio(j[0], j[1], where));
  return GaussianRational(ratio(j[0], j[1], where), ratio(j[2], j[3], where));
}

inline PeriodicPotential potential_from(const json& doc, const std::string& where);

inline PeriodicPotential body_from(const json& pot, const PeriodSpec& p, bool allow_non_coprime, const std::string& where) {
  if (!pot.is_object()) throw SpecError(where + ": expected an object");
  const std::string type = field(pot, "type", where).is_string() ? pot.at("type").get<std::string>() : "";
  if (type == "zero") {
    only_fields(pot, {"type"}, where);
    return PeriodicPotential::zero(p);
  }
  if (type == "constant") {
    only_fields(pot, {"type", "value"}, where);
    return PeriodicPotential::constant(p, exact_value(field(pot, "value", where), where + ".value"));
  }
  if (type == "explicit") {
    only_fields(pot, {"type", "values"}, where);
    const json& vals = field(pot, "values", where);
    if (!vals.is_array()) throw SpecError(where + ".values: expected an array");
    if (static_cast<int>(vals.size()) != p.volume())
      throw SpecError(where + ".values: expected " + std::to_string(p.volume()) + " values, got " + std::to_string(vals.size()));
    std::vector<GaussianRational> out;
    for (std::size_t i = 0; i < vals.size(); ++i) out.push_back(exact_value(vals[i], where + ".values[" + std::to_string(i) + "]"));
    return PeriodicPotential::exact(p, std::move(out));
  }
  if (type == "separable") {
    only_fields(pot, {"type", "partition", "parts"}, where);
    const json& part = field(pot, "partition", where);
    const json& parts = field(pot, "parts", where);
    if (!part.is_array() || !parts.is_array() || part.size() != parts.size())
      throw SpecError(where + ": partition and parts must be arrays of equal length");
    Partition blocks;
    std::vector<PeriodicPotential> pieces;
    for (std::size_t b = 0; b < part.size(); ++b) {
      blocks.push_back(static_cast<int>(integer(part[b], where + ".partition")));
      pieces.push_back(potential_from(parts[b], where + ".parts[" + std::to_string(b) + "]"));
    }
    PeriodicPotential v;
    try {
      v = direct_sum(pieces, blocks, allow_non_coprime);
    } catch (const std::invalid_argument& e) {
      throw SpecError(where + ": " + e.what());
    }
    if (v.periods().periods() != p.periods())
      throw SpecError(where + ": part periods " + v.periods().to_string() + " do not match " + p.to_string());
    return v;
  }
  if (type == "random") {
    only_fields(pot, {"type", "bounds", "max_denominator", "seed", "complex"}, where);
    long lo = -5, hi = 5, den = 1;
    if (pot.contains("bounds")) {
      const json& b = pot.at("bounds");
      if (!b.is_array() || b.size() != 2) throw SpecError(where + ".bounds: expected [lo, hi]");
      lo = integer(b[0], where + ".bounds");
      hi = integer(b[1], where + ".bounds");
      if (lo > hi) throw SpecError(where + ".bounds: lo > hi");
    }
    if (pot.contains("max_denominator")) den = integer(pot.at("max_denominator"), where + ".max_denominator");
    if (den < 1) throw SpecError(where + ".max_denominator: must be >= 1");
    const auto seed = static_cast<std::uint64_t>(integer(field(pot, "seed", where), where + ".seed"));
    bool cplx = false;
    if (pot.contains("complex")) {
      if (!pot.at("complex").is_boolean()) throw SpecError(where + ".complex: expected a boolean");
      cplx = pot.at("complex").get<bool>();
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> num(lo, hi), d(1, den);
    std::vector<GaussianRational> out;
    for (int i = 0; i < p.volume(); ++i) {
      mpq_class re(num(rng), d(rng));
      re.canonicalize();
      mpq_class im(0);
      if (cplx) {
        im = mpq_class(num(rng), d(rng));
        im.canonicalize();
      }
      out.emplace_back(re, im);
    }
    return PeriodicPotential::exact(p, std::move(out));
  }
  throw SpecError(where + ".type: expected zero, constant, explicit, separable or random");
}

inline PeriodicPotential potential_from(const json& doc, const std::string& where) {
  only_fields(doc, {"dims", "periods", "potential", "allow_non_coprime"}, where);
  const long dims = integer(field(doc, "dims", where), where + ".dims");
  const json& per = field(doc, "periods", where);
  if (!per.is_array()) throw SpecError(where + ".periods: expected an array");
  if (static_cast<long>(per.size()) != dims)
    throw SpecError(where + ": dims is " + std::to_string(dims) + " but " + std::to_string(per.size()) + " periods given");
  std::vector<int> q;
  for (const auto& x : per) q.push_back(static_cast<int>(integer(x, where + ".periods")));
  bool allow = false;
  if (doc.contains("allow_non_coprime")) {
    if (!doc.at("allow_non_coprime").is_boolean()) throw SpecError(where + ".allow_non_coprime: expected a boolean");
    allow = doc.at("allow_non_coprime").get<bool>();
  }
  PeriodSpec p;
  try {
    p = fundamental_domain(q, allow);
  } catch (const std::invalid_argument& e) {
    throw SpecError(where + ": " + e.what());
  }
  return body_from(field(doc, "potential", where), p, allow, where + ".potential");
}

}  // namespace detail

inline PeriodicPotential parse_potential_spec(const nlohmann::json& doc) { return detail::potential_from(doc, "spec"); }

inline PeriodicPotential parse_potential_spec(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError(std::string("spec: invalid JSON: ") + e.what());
  }
  return parse_potential_spec(doc);
}

inline PeriodicPotential load_potential_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_potential_spec(ss.str());
}

/// [p, q] when real, otherwise [re_p, re_q, im_p, im_q]; integers that do not fit in 64 bits
/// are written as strings.
inline nlohmann::json exact_value_json(const GaussianRational& x) {
  auto num = [](const mpz_class& z) -> nlohmann::json {
    if (z.fits_slong_p()) return z.get_si();
    return z.get_str();
  };
  if (x.imag() == 0) return {num(x.real().get_num()), num(x.real().get_den())};
  return {num(x.real().get_num()), num(x.real().get_den()), num(x.imag().get_num()), num(x.imag().get_den())};
}

/// Explicit-form document for an exact potential.
inline nlohmann::json potential_spec_json(const PeriodicPotential& v) {
  nlohmann::json doc;
  doc["dims"] = v.dim();
  doc["periods"] = v.periods().periods();
  if (v.periods().tainted()) doc["allow_non_coprime"] = true;
  nlohmann::json vals = nlohmann::json::array();
  for (const auto& x : v.exact_values()) vals.push_back(exact_value_json(x));
  doc["potential"] = {{"type", "explicit"}, {"values", vals}};
  return doc;
}

}  // namespace fermikit
