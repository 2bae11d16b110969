// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#include "binharm/serialize.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "binharm/errors.hpp"

namespace binharm {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const char* what) {
  if (!j.is_object()) throw ValidationError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ValidationError(std::string("unknown ") + what + " key '" + key + "'");
}

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void to_json(nlohmann::json& j, const ConditionSpec& s) {
  j = {{"f0", s.f0},
       {"mistuning_percent", s.mistuning_percent},
       {"n_components", s.n_components},
       {"target_freq", s.target_freq},
       {"target_ipd", s.target_ipd},
       {"masker_level", s.masker_level},
       {"level_reference_components", s.level_reference_components},
       {"duration", s.duration},
       {"ramp", s.ramp},
       {"sample_rate", s.sample_rate}};
}

void from_json(const nlohmann::json& j, ConditionSpec& s) {
  reject_unknown(j,
                 {"f0", "mistuning_percent", "n_components", "target_freq", "target_ipd",
                  "masker_level", "level_reference_components", "duration", "ramp", "sample_rate"},
                 "condition");
  read_opt(j, "f0", s.f0);
  read_opt(j, "mistuning_percent", s.mistuning_percent);
  read_opt(j, "n_components", s.n_components);
  read_opt(j, "target_freq", s.target_freq);
  read_opt(j, "target_ipd", s.target_ipd);
  read_opt(j, "masker_level", s.masker_level);
  read_opt(j, "level_reference_components", s.level_reference_components);
  read_opt(j, "duration", s.duration);
  read_opt(j, "ramp", s.ramp);
  read_opt(j, "sample_rate", s.sample_rate);
}

void to_json(nlohmann::json& j, const PathwayConfig& c) {
  j = {{"order", std::string(to_string(c.order))},
       {"sigma_m", c.sigma_m},
       {"sigma_b", c.sigma_b},
       {"mod_freq_harmonic", c.mod_freq_harmonic},
       {"mod_freq_mistuned", c.mod_freq_mistuned}};
}

void from_json(const nlohmann::json& j, PathwayConfig& c) {
  reject_unknown(j, {"order", "sigma_m", "sigma_b", "mod_freq_harmonic", "mod_freq_mistuned"},
                 "pathway");
  if (j.contains("order")) c.order = parse_pathway_order(j.at("order").get<std::string>());
  read_opt(j, "sigma_m", c.sigma_m);
  read_opt(j, "sigma_b", c.sigma_b);
  read_opt(j, "mod_freq_harmonic", c.mod_freq_harmonic);
  read_opt(j, "mod_freq_mistuned", c.mod_freq_mistuned);
}

void to_json(nlohmann::json& j, const SigmaFit& f) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : f.trace)
    trace.push_back({{"sigma", t.sigma}, {"mean_threshold", format_double(t.mean_threshold)}});
  j = {{"sigma", f.sigma},
       {"target_threshold", f.target_threshold},
       {"achieved_threshold", f.achieved_threshold},
       {"n_runs_used", f.n_runs_used},
       {"converged", f.converged},
       {"trace", trace}};
}

void from_json(const nlohmann::json& j, SigmaFit& f) {
  f.sigma = j.at("sigma").get<double>();
  f.target_threshold = j.at("target_threshold").get<double>();
  f.achieved_threshold = j.at("achieved_threshold").get<double>();
  f.n_runs_used = j.at("n_runs_used").get<int>();
  f.converged = j.value("converged", true);
  f.trace.clear();
  if (j.contains("trace"))
    for (const auto& t : j.at("trace"))
      f.trace.push_back({t.at("sigma").get<double>(), std::stod(t.at("mean_threshold").get<std::string>())});
}

void to_json(nlohmann::json& j, const CalibrationAnchors& a) {
  j = {{"diotic_harmonic_relative", a.diotic_harmonic_relative},
       {"dichotic_harmonic_relative", a.dichotic_harmonic_relative}};
}

void from_json(const nlohmann::json& j, CalibrationAnchors& a) {
  reject_unknown(j, {"diotic_harmonic_relative", "dichotic_harmonic_relative"}, "anchors");
  read_opt(j, "diotic_harmonic_relative", a.diotic_harmonic_relative);
  read_opt(j, "dichotic_harmonic_relative", a.dichotic_harmonic_relative);
}

nlohmann::json human_reference_json() {
  const HumanReference& h = kHumanReference;
  return {{"exp1",
           {{"diotic_harmonic_relative", h.exp1.diotic_harmonic_relative},
            {"dichotic_harmonic_relative", h.exp1.dichotic_harmonic_relative},
            {"mistuning_release", h.exp1.mistuning_release},
            {"bmld_harmonic", h.exp1.bmld_harmonic},
            {"bmld_mistuned", h.exp1.bmld_mistuned}}},
          {"exp2",
           {{"mistuning_release_diotic", h.exp2.mistuning_release_diotic},
            {"bmld_harmonic", h.exp2.bmld_harmonic},
            {"bmld_mistuned", h.exp2.bmld_mistuned}}},
          {"exp3",
           {{"mistuning_release_diotic", h.exp3.mistuning_release_diotic},
            {"mistuning_release_dichotic", h.exp3.mistuning_release_dichotic},
            {"bmld_harmonic", h.exp3.bmld_harmonic},
            {"bmld_mistuned", h.exp3.bmld_mistuned}}}};
}

}  // namespace binharm
