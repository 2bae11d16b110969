// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#include "binharm/stimulus.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "binharm/errors.hpp"
#include "binharm/filters.hpp"

namespace binharm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

MonoSignal masker_channel(const ConditionSpec& spec, std::span<const double> phases) {
  const auto freqs = component_frequencies(spec);
  if (phases.size() != freqs.size())
    throw ValidationError("need exactly one phase per masker component");
  const double amp = level_to_amplitude(spec.component_level());
  MonoSignal out(spec.n_samples(), spec.sample_rate);
  add_tones(out.samples, freqs, amp, phases, spec.sample_rate);
  return out;
}

// Ungated target; the right channel carries the extra interaural phase.
StereoSignal target_channels(const ConditionSpec& spec, double level, double phase) {
  MonoSignal left(spec.n_samples(), spec.sample_rate);
  add_tone(left.samples, spec.target_freq, level_to_amplitude(level), phase, spec.sample_rate);
  MonoSignal right = left;
  if (spec.target_ipd == std::numbers::pi) {
    for (double& v : right.samples) v = -v;
  } else if (spec.target_ipd != 0.0) {
    right = MonoSignal(spec.n_samples(), spec.sample_rate);
    add_tone(right.samples, spec.target_freq, level_to_amplitude(level), phase + spec.target_ipd,
             spec.sample_rate);
  }
  return StereoSignal(std::move(left), std::move(right));
}

std::vector<double> random_phases(std::size_t n, Rng& rng) {
  std::vector<double> phases(n);
  for (double& p : phases) p = kTwoPi * uniform01(rng);
  return phases;
}

}  // namespace

std::size_t ConditionSpec::n_samples() const {
  return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

int ConditionSpec::target_harmonic() const {
  return static_cast<int>(std::llround(target_freq / f0));
}

double ConditionSpec::component_level() const {
  const int ref = level_reference_components > 0 ? level_reference_components : n_components;
  return masker_level - 10.0 * std::log10(static_cast<double>(ref));
}

void validate(const ConditionSpec& spec) {
  std::ostringstream err;
  if (!(spec.sample_rate > 0.0)) err << "sample_rate must be positive; ";
  if (!(spec.f0 > 0.0)) err << "f0 must be positive; ";
  if (!(spec.mistuning_percent >= 0.0)) err << "mistuning must be >= 0; ";
  if (spec.n_components < 2 || spec.n_components % 2 != 0)
    err << "n_components must be even and >= 2 (got " << spec.n_components << "); ";
  if (!(spec.target_freq > 0.0) || !(spec.target_freq < spec.sample_rate / 2.0))
    err << "target frequency must be in (0, Nyquist); ";
  if (spec.f0 > 0.0) {
    const double ratio = spec.target_freq / spec.f0;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1.0)
      err << "target frequency must be an integer multiple of f0; ";
    else if (spec.n_components >= 2 && spec.target_harmonic() - spec.n_components / 2 < 1)
      err << "not enough harmonics below the target for " << spec.n_components << " components; ";
  }
  if (!std::isfinite(spec.masker_level)) err << "masker level must be finite; ";
  if (spec.level_reference_components < 0) err << "level_reference_components must be >= 0; ";
  if (!std::isfinite(spec.target_ipd)) err << "target ipd must be finite; ";
  if (!(spec.duration > 0.0)) err << "duration must be positive; ";
  if (!(spec.ramp >= 0.0) || 2.0 * spec.ramp > spec.duration) err << "ramp must fit twice in duration; ";
  const std::string msg = err.str();
  if (!msg.empty()) throw ValidationError("invalid condition: " + msg.substr(0, msg.size() - 2));

  const double top = (spec.target_harmonic() + spec.n_components / 2) * spec.f0 *
                     (1.0 + spec.mistuning_percent / 100.0);
  if (top >= spec.sample_rate / 2.0) throw ValidationError("masker component at or above Nyquist");
}

std::vector<double> component_frequencies(const ConditionSpec& spec) {
  validate(spec);
  const int ht = spec.target_harmonic();
  const int half = spec.n_components / 2;
  const double f0 = spec.f0 * (1.0 + spec.mistuning_percent / 100.0);
  std::vector<double> freqs;
  freqs.reserve(static_cast<std::size_t>(spec.n_components));
  for (int h = ht - half; h <= ht + half; ++h) {
    if (h == ht) continue;
    freqs.push_back(h * f0);
  }
  return freqs;
}

StereoSignal build_masker(const ConditionSpec& spec, std::span<const double> phases) {
  MonoSignal m = hann_gate(masker_channel(spec, phases), spec.ramp);
  return StereoSignal(m, m);
}

StereoSignal build_target(const ConditionSpec& spec, double level, double phase) {
  validate(spec);
  return hann_gate(target_channels(spec, level, phase), spec.ramp);
}

TrialStimulus assemble_trial(const ConditionSpec& spec, double target_level, Rng& rng,
                             const TrialOptions& options) {
  validate(spec);
  const auto n_comp = static_cast<std::size_t>(spec.n_components);
  TrialStimulus trial;
  trial.target_level = target_level;
  trial.target_position = uniform01(rng) < 0.5 ? 0 : 1;

  // Draw order is fixed: masker phases, target phase, optional noise, per interval.
  auto make_interval = [&](bool with_target) {
    const auto phases = random_phases(n_comp, rng);
    const double target_phase = kTwoPi * uniform01(rng);
    MonoSignal m = masker_channel(spec, phases);
    StereoSignal s(m, m);
    if (with_target && std::isfinite(target_level)) {
      StereoSignal t = target_channels(spec, target_level, target_phase);
      for (std::size_t i = 0; i < s.size(); ++i) {
        s.left.samples[i] += t.left.samples[i];
        s.right.samples[i] += t.right.samples[i];
      }
    }
    // The summed interval is gated once.
    s = hann_gate(std::move(s), spec.ramp);
    if (options.background_noise) {
      StereoSignal noise = background_noise(spec.duration, rng, spec.sample_rate);
      for (std::size_t i = 0; i < s.size(); ++i) {
        s.left.samples[i] += noise.left.samples[i];
        s.right.samples[i] += noise.right.samples[i];
      }
    }
    return s;
  };

  trial.reference = make_interval(false);
  for (int k = 0; k < 2; ++k) trial.comparisons[k] = make_interval(k == trial.target_position);
  return trial;
}

StereoSignal background_noise(double duration, Rng& rng, double sample_rate) {
  const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  // Discard the filter's start-up transient.
  const auto lead = static_cast<std::size_t>(sample_rate * 0.05);
  const ButterworthLowpass lp(kBackgroundNoiseCutoff, 4, sample_rate);
  const double target_rms = std::pow(10.0, (kBackgroundNoiseLevel - kReferenceLevelDb) / 20.0);
  auto channel = [&] {
    MonoSignal raw = gaussian_noise(n + lead, 1.0, rng, sample_rate);
    std::vector<double> y = lp.process(raw.samples);
    std::vector<double> out(y.begin() + static_cast<std::ptrdiff_t>(lead), y.end());
    const double scale = target_rms / rms(out);
    for (double& v : out) v *= scale;
    return MonoSignal(std::move(out), sample_rate);
  };
  MonoSignal left = channel();
  MonoSignal right = channel();
  return StereoSignal(std::move(left), std::move(right));
}

}  // namespace binharm
