// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#include "binharm/signal.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "binharm/errors.hpp"

namespace binharm {

StereoSignal::StereoSignal(MonoSignal l, MonoSignal r) : left(std::move(l)), right(std::move(r)) {
  if (left.size() != right.size() || left.sample_rate != right.sample_rate)
    throw ValidationError("stereo channels differ in length or sample rate");
}

bool StereoSignal::is_diotic() const {
  return left.size() == right.size() &&
         (left.size() == 0 ||
          std::memcmp(left.samples.data(), right.samples.data(), left.size() * sizeof(double)) == 0);
}

double level_to_amplitude(double level_db) {
  if (!std::isfinite(level_db)) throw ValidationError("level must be finite");
  return std::numbers::sqrt2 * std::pow(10.0, (level_db - kReferenceLevelDb) / 20.0);
}

double amplitude_to_level(double peak_amplitude) {
  return kReferenceLevelDb + 20.0 * std::log10(peak_amplitude / std::numbers::sqrt2);
}

double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

double rms_level(std::span<const double> x) { return kReferenceLevelDb + 20.0 * std::log10(rms(x)); }

MonoSignal hann_gate(MonoSignal signal, double ramp_seconds) {
  if (ramp_seconds < 0.0) throw ValidationError("ramp must be non-negative");
  const auto ramp = static_cast<std::size_t>(std::llround(ramp_seconds * signal.sample_rate));
  if (2 * ramp > signal.size()) throw ValidationError("ramp too long for signal");
  if (ramp == 0) return signal;
  const std::size_t n = signal.size();
  for (std::size_t i = 0; i < ramp; ++i) {
    // w(0) = 0, w(ramp) = 1; the mirrored fall keeps the last sample at 0.
    const double w = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) /
                                          static_cast<double>(ramp));
    signal.samples[i] *= w;
    signal.samples[n - 1 - i] *= w;
  }
  return signal;
}

StereoSignal hann_gate(StereoSignal signal, double ramp_seconds) {
  signal.left = hann_gate(std::move(signal.left), ramp_seconds);
  signal.right = hann_gate(std::move(signal.right), ramp_seconds);
  return signal;
}

MonoSignal downsample(const MonoSignal& signal, double target_rate) {
  if (!(target_rate > 0.0)) throw ValidationError("target rate must be positive");
  const double ratio = signal.sample_rate / target_rate;
  const auto factor = static_cast<std::size_t>(std::llround(ratio));
  if (factor == 0 || std::abs(ratio - static_cast<double>(factor)) > 1e-9) {
    std::ostringstream msg;
    msg << "sample rate " << signal.sample_rate << " is not an integer multiple of " << target_rate;
    throw ValidationError(msg.str());
  }
  MonoSignal out(signal.size() / factor, target_rate);
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] = signal.samples[i * factor];
  return out;
}

MonoSignal gaussian_noise(std::size_t n, double sigma, Rng& rng, double sample_rate) {
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be non-negative");
  MonoSignal out(n, sample_rate);
  if (sigma == 0.0) return out;
  std::normal_distribution<double> dist(0.0, sigma);
  for (double& v : out.samples) v = dist(rng);
  return out;
}

void add_tone(std::span<double> out, double freq_hz, double amplitude, double phase,
              double sample_rate) {
  // Phasor recursion, re-anchored to the exact value every block to bound drift.
  constexpr std::size_t kBlock = 1024;
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
  const double cr = std::cos(w), ci = std::sin(w);
  for (std::size_t start = 0; start < out.size(); start += kBlock) {
    const double theta = w * static_cast<double>(start) + phase;
    double zr = amplitude * std::cos(theta), zi = amplitude * std::sin(theta);
    const std::size_t end = std::min(out.size(), start + kBlock);
    for (std::size_t i = start; i < end; ++i) {
      out[i] += zr;
      const double nr = zr * cr - zi * ci;
      zi = zr * ci + zi * cr;
      zr = nr;
    }
  }
}

void add_tones(std::span<double> out, std::span<const double> freqs_hz, double amplitude,
               std::span<const double> phases, double sample_rate) {
  // Components advance side by side so the phasor recursions overlap.
  constexpr std::size_t kBlock = 1024;
  const std::size_t m = freqs_hz.size();
  std::vector<double> cr(m), ci(m), w(m), zr(m), zi(m);
  for (std::size_t k = 0; k < m; ++k) {
    w[k] = 2.0 * std::numbers::pi * freqs_hz[k] / sample_rate;
    cr[k] = std::cos(w[k]);
    ci[k] = std::sin(w[k]);
  }
  for (std::size_t start = 0; start < out.size(); start += kBlock) {
    for (std::size_t k = 0; k < m; ++k) {
      const double theta = w[k] * static_cast<double>(start) + phases[k];
      zr[k] = amplitude * std::cos(theta);
      zi[k] = amplitude * std::sin(theta);
    }
    const std::size_t end = std::min(out.size(), start + kBlock);
    for (std::size_t i = start; i < end; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        acc += zr[k];
        const double nr = zr[k] * cr[k] - zi[k] * ci[k];
        zi[k] = zr[k] * ci[k] + zi[k] * cr[k];
        zr[k] = nr;
      }
      out[i] += acc;
    }
  }
}

}  // namespace binharm
