// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment presets, human reference data, internal-noise calibration and
// the simulated-threshold tables (masking release by mistuning, BMLD).

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "binharm/model.hpp"
#include "binharm/psychophysics.hpp"
#include "binharm/stimulus.hpp"

namespace binharm {

enum class ExperimentId { kExp2 = 2, kExp3 = 3 };

ExperimentId parse_experiment(std::string_view name);  // "2", "exp2", "Exp2"
std::string_view to_string(ExperimentId id);            // "exp2"

// Index order of the four conditions everywhere in this module.
enum class ConditionKind { kDioticHarmonic, kDioticMistuned, kDichoticHarmonic, kDichoticMistuned };
inline constexpr std::array<ConditionKind, 4> kAllConditions = {
    ConditionKind::kDioticHarmonic, ConditionKind::kDioticMistuned,
    ConditionKind::kDichoticHarmonic, ConditionKind::kDichoticMistuned};
std::string_view to_string(ConditionKind kind);  // "diotic-harmonic", ...
ConditionKind parse_condition(std::string_view name);

inline constexpr double kMistuningPercent = 2.64;

struct ExperimentPreset {
  ExperimentId id;
  std::array<ConditionSpec, 4> conditions;  // indexed by ConditionKind

  const ConditionSpec& condition(ConditionKind k) const {
    return conditions[static_cast<std::size_t>(k)];
  }
};

ExperimentPreset experiment_preset(ExperimentId id);

// Group means reported for the listening experiments (dB).
struct HumanReference {
  struct Exp1 {
    double diotic_harmonic_relative = -12.0;
    double dichotic_harmonic_relative = -17.0;
    double mistuning_release = 6.3;
    double bmld_harmonic = 5.5;
    double bmld_mistuned = 0.7;
  } exp1;
  struct Exp2 {
    double mistuning_release_diotic = 5.8;
    double bmld_harmonic = 8.0;
    double bmld_mistuned = 2.0;
  } exp2;
  struct Exp3 {
    double mistuning_release_diotic = 2.1;
    double mistuning_release_dichotic = 0.5;
    double bmld_harmonic = 7.0;
    double bmld_mistuned = 5.0;
  } exp3;
};
inline constexpr HumanReference kHumanReference{};

// Internal-noise values reported for the original implementation. Their
// scale depends on that implementation's internal units; metadata only.
struct PublishedSigmas {
  double sigma_m = 0.01;
  double sigma_b_binaural_then_mod = 0.04;
  double sigma_b_mod_then_binaural = 0.0076;
  double sigma_b_no_mod_in_binaural = 0.0161;
};
inline constexpr PublishedSigmas kPublishedSigmas{};

// Calibration targets, dB relative to the masker level.
struct CalibrationAnchors {
  double diotic_harmonic_relative = -8.0;
  double dichotic_harmonic_relative = -18.0;
};

enum class NoiseTarget { kMonaural, kBinaural };

struct SigmaFitOptions {
  int n_tracks = 100;
  double tolerance_db = 0.5;
  int max_bisection_steps = 20;
  double bracket_lo = 1e-6;
  double bracket_hi = 1e2;
  int max_bracket_expansions = 6;
  int jobs = 1;
};

struct SigmaTraceEntry {
  double sigma;
  double mean_threshold;  // +inf when a track left the safe range upwards
};

struct SigmaFit {
  double sigma = 0.0;
  double target_threshold = 0.0;
  double achieved_threshold = 0.0;
  int n_runs_used = 0;
  bool converged = false;
  std::vector<SigmaTraceEntry> trace;
};

// Mean threshold over `n_tracks` tracks with `sigma` placed in the monaural or
// binaural slot of `base`. Track t always uses derive_seed(seed, {t}), so
// every sigma sees the same stimuli. Returns +inf if a track overshoots the
// upper bound and -inf if one undershoots the lower bound.
double mean_track_threshold(const ConditionSpec& condition, PathwayConfig base, NoiseTarget target,
                            double sigma, int n_tracks, std::uint64_t seed, int jobs);

// Bisection on log(sigma) until the mean threshold is within tolerance of
// `target_threshold` (dB SPL). Throws RuntimeError naming the sigma = 0 floor
// when the target lies below it.
SigmaFit fit_sigma(const ConditionSpec& condition, const PathwayConfig& base, NoiseTarget target,
                   double target_threshold, std::uint64_t seed, const SigmaFitOptions& options = {});

// Harmonic minus mistuned mean threshold.
double masking_release(const ThresholdResult& mistuned, const ThresholdResult& harmonic);
// Diotic minus dichotic mean threshold.
double bmld(const ThresholdResult& diotic, const ThresholdResult& dichotic);

struct ConditionSummary {
  ConditionKind kind;
  std::vector<ThresholdResult> samples;
  double mean = 0.0;  // mean of sample mean_thresholds, dB SPL
  double std = 0.0;   // sample standard deviation
};

struct ExperimentResult {
  ExperimentId experiment;
  PathwayConfig pathway;
  std::array<ConditionSummary, 4> conditions;
  double release_diotic = 0.0;
  double release_dichotic = 0.0;
  double bmld_harmonic = 0.0;
  double bmld_mistuned = 0.0;
  // Per-sample releases for error bars (sample i of harmonic vs mistuned).
  std::vector<double> release_diotic_samples;
  std::vector<double> release_dichotic_samples;

  const ConditionSummary& condition(ConditionKind k) const {
    return conditions[static_cast<std::size_t>(k)];
  }
};

struct ExperimentOptions {
  int n_threshold_samples = 20;
  int runs_per_threshold = 5;
  bool background_noise = false;
  int jobs = 1;
};

ExperimentResult run_experiment(const ExperimentPreset& preset, const PathwayConfig& pathway,
                                std::uint64_t seed, const ExperimentOptions& options = {});

}  // namespace binharm
