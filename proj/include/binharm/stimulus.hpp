// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Harmonic / mistuned complex-tone maskers with an 800-Hz-style target tone,
// assembled into three-interval trials.

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "binharm/rng.hpp"
#include "binharm/signal.hpp"

namespace binharm {

inline constexpr double kNoTarget = -std::numeric_limits<double>::infinity();

struct ConditionSpec {
  double f0 = 40.0;               // nominal fundamental, Hz
  double mistuning_percent = 0.0; // applied to f0
  int n_components = 8;           // masker components, half below and half above the target
  double target_freq = 800.0;     // Hz, must be a harmonic of the nominal f0
  double target_ipd = 0.0;        // radians, applied to the right channel
  double masker_level = 65.0;     // dB SPL, see level_reference_components
  // Number of equal-amplitude components whose power sum is masker_level.
  // 0 means n_components (masker_level is the total level). Setting it to 8
  // for a 32-component masker keeps each component at the level it has in
  // the 8-component masker.
  int level_reference_components = 0;
  double duration = 0.4;          // seconds
  double ramp = 0.025;            // seconds
  double sample_rate = 48000.0;

  bool is_mistuned() const { return mistuning_percent > 0.0; }
  bool is_dichotic() const { return target_ipd != 0.0; }
  std::size_t n_samples() const;
  int target_harmonic() const;
  double component_level() const;

  bool operator==(const ConditionSpec&) const = default;
};

// Throws ValidationError when the spec breaks an invariant.
void validate(const ConditionSpec& spec);

std::vector<double> component_frequencies(const ConditionSpec& spec);

StereoSignal build_masker(const ConditionSpec& spec, std::span<const double> phases);
// `level` is per channel, dB SPL.
StereoSignal build_target(const ConditionSpec& spec, double level, double phase);

struct TrialStimulus {
  StereoSignal reference;
  std::array<StereoSignal, 2> comparisons;
  int target_position = 0;  // index into comparisons
  double target_level = kNoTarget;
};

struct TrialOptions {
  bool background_noise = false;
};

// Three independently phased intervals; the target (unless target_level is
// -inf) is added to one comparison chosen uniformly.
TrialStimulus assemble_trial(const ConditionSpec& spec, double target_level, Rng& rng,
                             const TrialOptions& options = {});

inline constexpr double kBackgroundNoiseLevel = 45.0;
inline constexpr double kBackgroundNoiseCutoff = 380.0;

// Interaurally uncorrelated Gaussian noise, 4th-order Butterworth lowpassed,
// each channel scaled to 45 dB SPL RMS.
StereoSignal background_noise(double duration, Rng& rng, double sample_rate = 48000.0);

}  // namespace binharm
