// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON forms of the domain types (nlohmann::json ADL hooks).

#pragma once

#include <json.hpp>

#include "binharm/experiments.hpp"
#include "binharm/model.hpp"
#include "binharm/psychophysics.hpp"
#include "binharm/stimulus.hpp"

namespace binharm {

void to_json(nlohmann::json& j, const ConditionSpec& s);
// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, ConditionSpec& s);

void to_json(nlohmann::json& j, const PathwayConfig& c);
void from_json(const nlohmann::json& j, PathwayConfig& c);

void to_json(nlohmann::json& j, const SigmaFit& f);
void from_json(const nlohmann::json& j, SigmaFit& f);

void to_json(nlohmann::json& j, const CalibrationAnchors& a);
void from_json(const nlohmann::json& j, CalibrationAnchors& a);

nlohmann::json human_reference_json();

// Doubles as the shortest decimal string that round-trips.
std::string format_double(double v);

}  // namespace binharm
