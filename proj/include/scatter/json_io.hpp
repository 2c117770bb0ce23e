#pragma once

// JSON descriptions of banks and models, and JSON renderings of reports.
//
// Bank:  {"mother": {"name": "morlet", "params": {"xi0": 3, "sigma": 1}},
//         "J": 3, "j_min": -24, "N": 256, "octave_samples": 2048}
// Model: {"kind": "ar1", "params": {"sigma": 1, "rho": 0.5}, "N": 256}
//
// j_min and octave_samples are optional.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "scatter/decay.hpp"
#include "scatter/filterbank.hpp"
#include "scatter/scattering.hpp"
#include "scatter/stationary.hpp"

namespace scatter::io {

using nlohmann::json;

inline json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

struct BankDescription {
  std::string mother;
  std::map<std::string, double> params;
  int J = 0;
  std::optional<int> j_min;
  std::size_t N = 0;
  DecayOptions decay;

  FilterBank build() const {
    auto m = make_mother(mother, params);
    return j_min ? build_bank(std::move(m), J, *j_min, N) : build_bank(std::move(m), J, N);
  }
};

namespace detail {

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": field '" + key + "': " + e.what());
  }
}

inline std::map<std::string, double> params_of(const json& j, const std::string& where) {
  std::map<std::string, double> out;
  if (!j.contains("params")) return out;
  const auto& p = j.at("params");
  if (!p.is_object()) throw ParseError(where + ": params must be an object");
  for (const auto& [k, v] : p.items()) {
    if (!v.is_number()) throw ParseError(where + ": param '" + k + "' must be a number");
    out[k] = v.get<double>();
  }
  return out;
}

}  // namespace detail

inline BankDescription parse_bank(const json& j) {
  const std::string where = "bank";
  if (!j.is_object()) throw ParseError("bank description must be a JSON object");
  if (!j.contains("mother") || !j.at("mother").is_object()) throw ParseError("bank: missing object 'mother'");
  BankDescription d;
  d.mother = detail::field<std::string>(j.at("mother"), "name", "bank.mother");
  d.params = detail::params_of(j.at("mother"), "bank.mother");
  d.J = detail::field<int>(j, "J", where);
  d.N = detail::field<std::size_t>(j, "N", where);
  if (j.contains("j_min")) d.j_min = detail::field<int>(j, "j_min", where);
  if (j.contains("octave_samples")) d.decay.octave_samples = detail::field<std::size_t>(j, "octave_samples", where);
  try {
    (void)d.build();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("bank: ") + e.what());
  }
  return d;
}

inline BankDescription load_bank(const std::filesystem::path& path) { return parse_bank(load_json(path)); }

struct ModelDescription {
  ModelKind kind = ModelKind::white;
  std::map<std::string, double> params;
  std::size_t N = 0;

  StationaryModel build() const { return make_model(kind, params, N); }
};

inline ModelDescription parse_model(const json& j) {
  if (!j.is_object()) throw ParseError("model description must be a JSON object");
  ModelDescription d;
  try {
    d.kind = parse_model_kind(detail::field<std::string>(j, "kind", "model"));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  d.params = detail::params_of(j, "model");
  d.N = detail::field<std::size_t>(j, "N", "model");
  try {
    (void)d.build();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  return d;
}

inline ModelDescription load_model(const std::filesystem::path& path) { return parse_model(load_json(path)); }

inline json to_json(const ConditionReport& r) {
  json j = {{"condition", to_string(r.condition)},
            {"passed", r.passed},
            {"margin", r.margin},
            {"witness_freq", r.witness_freq},
            {"tolerance", r.tolerance}};
  j["details"] = r.details;
  return j;
}

inline json to_json(const VanishingOrderReport& v) {
  return {{"epsilon_hat", v.epsilon_hat}, {"fit_lo", v.fit_lo},     {"fit_hi", v.fit_hi},
          {"slope", v.slope},             {"residual", v.residual}, {"points", v.points},
          {"identically_zero_near_0", v.identically_zero_near_0},   {"passed", v.passed}};
}

inline json to_json(const BankAudit& a) {
  return {{"littlewood_paley", to_json(a.littlewood_paley)},
          {"asymmetry", to_json(a.asymmetry)},
          {"vanishing_order", to_json(a.vanishing_order)},
          {"vanishing_fit", to_json(a.vanishing_fit)},
          {"passed", a.passed()}};
}

inline json to_json(const Band& b) { return json::array({b.lo, b.hi}); }

inline json to_json(const DecayConstants& k) {
  json j = {{"c", k.c}, {"C", k.C}, {"delta", k.delta}, {"a", k.a}, {"x_init", k.x_init}, {"r", k.r}};
  j["validated_band"] = to_json(k.validated_band);
  j["margins"] = k.margins;
  return j;
}

inline json to_json(const MCEstimate& e) {
  return {{"estimate", e.value}, {"stderr", e.std_error}, {"trials", e.trials}, {"seed", e.seed}};
}

inline void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace scatter::io
