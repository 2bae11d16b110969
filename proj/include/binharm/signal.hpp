// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Sampled signals, the dB SPL level convention and the stateless DSP helpers
// shared by stimulus synthesis and the auditory model.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "binharm/rng.hpp"

namespace binharm {

// A sine of RMS 1.0 is defined as this many dB SPL.
inline constexpr double kReferenceLevelDb = 100.0;

struct MonoSignal {
  std::vector<double> samples;
  double sample_rate = 48000.0;

  MonoSignal() = default;
  MonoSignal(std::vector<double> s, double rate) : samples(std::move(s)), sample_rate(rate) {}
  MonoSignal(std::size_t n, double rate) : samples(n, 0.0), sample_rate(rate) {}

  std::size_t size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
  double& operator[](std::size_t i) { return samples[i]; }
  double operator[](std::size_t i) const { return samples[i]; }
};

struct StereoSignal {
  MonoSignal left;
  MonoSignal right;

  StereoSignal() = default;
  StereoSignal(MonoSignal l, MonoSignal r);
  StereoSignal(std::size_t n, double rate) : left(n, rate), right(n, rate) {}

  std::size_t size() const { return left.size(); }
  double sample_rate() const { return left.sample_rate; }
  // Bitwise-equal channels (diotic).
  bool is_diotic() const;
};

// Peak amplitude of a sine at `level_db` dB SPL. Throws on non-finite input.
double level_to_amplitude(double level_db);
// Inverse of level_to_amplitude.
double amplitude_to_level(double peak_amplitude);
// Level of a signal by its RMS (RMS 1.0 == 100 dB SPL).
double rms(std::span<const double> x);
double rms_level(std::span<const double> x);

// Raised-cosine on/off ramps of `ramp_seconds` each; endpoints become exactly 0.
MonoSignal hann_gate(MonoSignal signal, double ramp_seconds);
StereoSignal hann_gate(StereoSignal signal, double ramp_seconds);

// Integer-factor decimation by sample picking. No anti-aliasing.
MonoSignal downsample(const MonoSignal& signal, double target_rate);

MonoSignal gaussian_noise(std::size_t n, double sigma, Rng& rng, double sample_rate = 48000.0);

// Adds amplitude * cos(2 pi f t + phase) to `out` in place, t = n / sample_rate.
void add_tone(std::span<double> out, double freq_hz, double amplitude, double phase,
              double sample_rate);
// Sum of tones with a shared amplitude; same result as repeated add_tone.
void add_tones(std::span<double> out, std::span<const double> freqs_hz, double amplitude,
               std::span<const double> phases, double sample_rate);

}  // namespace binharm
