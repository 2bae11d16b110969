// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Single-channel auditory model: periphery (gammatone, half-wave
// rectification, 770-Hz lowpass), one modulation filter, a monaural pathway
// and three orderings of the binaural (equalization-cancellation) pathway,
// ending in the noisy energy decision variable.

#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "binharm/filters.hpp"
#include "binharm/psychophysics_fwd.hpp"
#include "binharm/rng.hpp"
#include "binharm/signal.hpp"
#include "binharm/stimulus.hpp"

namespace binharm {

enum class PathwayOrder { kBinauralThenMod, kModThenBinaural, kNoModInBinaural };

std::string_view to_string(PathwayOrder order);
// Accepts "binaural-then-mod", "mod-then-binaural", "no-mod-in-binaural".
PathwayOrder parse_pathway_order(std::string_view name);
inline constexpr PathwayOrder kAllPathwayOrders[] = {
    PathwayOrder::kBinauralThenMod, PathwayOrder::kModThenBinaural,
    PathwayOrder::kNoModInBinaural};

struct PathwayConfig {
  PathwayOrder order = PathwayOrder::kBinauralThenMod;
  double sigma_m = 0.0;  // monaural internal noise std
  double sigma_b = 0.0;  // binaural internal noise std
  double mod_freq_harmonic = 40.0;
  double mod_freq_mistuned = 20.0;

  double mod_freq(bool mistuned) const { return mistuned ? mod_freq_mistuned : mod_freq_harmonic; }
};

void validate(const PathwayConfig& cfg);

struct ModelConstants {
  double center_freq = 800.0;
  int gammatone_order = 4;
  double lowpass_cutoff = 770.0;
  int lowpass_order = 5;
  double envelope_rate = 2000.0;
  double mod_q = 2.0;
};

struct InternalSignal {
  std::vector<std::complex<double>> samples;
  double sample_rate = 2000.0;
};

// Peripheral stage with pre-designed filters; reusable across calls.
class Periphery {
 public:
  explicit Periphery(double sample_rate = 48000.0, const ModelConstants& constants = {});

  MonoSignal process(const MonoSignal& channel) const;
  StereoSignal process(const StereoSignal& stimulus) const;

 private:
  double sample_rate_;
  Gammatone gammatone_;
  ButterworthLowpass lowpass_;
};

// Per channel: gammatone(800 Hz, 1 ERB) -> max(x, 0) -> Butterworth(770 Hz, 5).
StereoSignal peripheral(const StereoSignal& stimulus);

// Downsample to 2 kHz, subtract the segment mean, complex modulation filter (Q = 2).
InternalSignal envelope_extract(const MonoSignal& channel, double mod_freq,
                                const ModelConstants& constants = {});

MonoSignal monaural_pathway(const StereoSignal& internal, bool mistuned, const PathwayConfig& cfg);
MonoSignal binaural_pathway(const StereoSignal& internal, bool mistuned, const PathwayConfig& cfg);

// Index range [begin, end) of the central half of an interval of n samples.
struct Window {
  std::size_t begin;
  std::size_t end;
};
Window central_window(std::size_t n);

// Sum over the central half of (x + noise)^2, noise ~ N(0, sigma) i.i.d.
double decision_energy(const MonoSignal& pathway_out, double sigma, Rng& rng);

// Picks the comparison interval with the larger E_total, using the monaural
// pathway (sigma_m) for diotic conditions and the binaural pathway (sigma_b)
// for dichotic ones. Exact ties are broken uniformly at random.
class ModelObserver final : public Observer {
 public:
  explicit ModelObserver(PathwayConfig cfg, double sample_rate = 48000.0);

  int choose(const TrialStimulus& trial, const ConditionSpec& spec, Rng& rng) const override;

  // E_total of a single interval, exposed for introspection and property tests.
  double interval_energy(const StereoSignal& interval, const ConditionSpec& spec, Rng& rng) const;
  // Noise-free pathway output for one interval.
  MonoSignal pathway_output(const StereoSignal& interval, const ConditionSpec& spec) const;

  const PathwayConfig& config() const { return cfg_; }

 private:
  PathwayConfig cfg_;
  Periphery periphery_;
};

}  // namespace binharm
