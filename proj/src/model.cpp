// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#include "binharm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "binharm/errors.hpp"

namespace binharm {

namespace {

MonoSignal difference(const MonoSignal& a, const MonoSignal& b) {
  MonoSignal d(a.size(), a.sample_rate);
  for (std::size_t i = 0; i < a.size(); ++i) d.samples[i] = a.samples[i] - b.samples[i];
  return d;
}

MonoSignal magnitude(const InternalSignal& s) {
  MonoSignal out(s.samples.size(), s.sample_rate);
  for (std::size_t i = 0; i < s.samples.size(); ++i) out.samples[i] = std::abs(s.samples[i]);
  return out;
}

}  // namespace

std::string_view to_string(PathwayOrder order) {
  switch (order) {
    case PathwayOrder::kBinauralThenMod: return "binaural-then-mod";
    case PathwayOrder::kModThenBinaural: return "mod-then-binaural";
    case PathwayOrder::kNoModInBinaural: return "no-mod-in-binaural";
  }
  return "unknown";
}

PathwayOrder parse_pathway_order(std::string_view name) {
  for (PathwayOrder o : kAllPathwayOrders)
    if (to_string(o) == name) return o;
  throw ValidationError("unknown pathway order '" + std::string(name) +
                        "' (expected binaural-then-mod, mod-then-binaural or no-mod-in-binaural)");
}

void validate(const PathwayConfig& cfg) {
  if (!(cfg.sigma_m >= 0.0) || !(cfg.sigma_b >= 0.0))
    throw ValidationError("internal noise sigmas must be >= 0");
  if (!(cfg.mod_freq_harmonic > 0.0) || !(cfg.mod_freq_mistuned > 0.0))
    throw ValidationError("modulation filter frequencies must be positive");
}

Periphery::Periphery(double sample_rate, const ModelConstants& c)
    : sample_rate_(sample_rate),
      gammatone_(c.center_freq, erb_hz(c.center_freq), c.gammatone_order, sample_rate),
      lowpass_(c.lowpass_cutoff, c.lowpass_order, sample_rate) {}

MonoSignal Periphery::process(const MonoSignal& channel) const {
  if (channel.sample_rate != sample_rate_)
    throw ValidationError("periphery configured for a different sample rate");
  std::vector<double> y = gammatone_.process(channel.samples);
  for (double& v : y) v = std::max(v, 0.0);
  return MonoSignal(lowpass_.process(y), sample_rate_);
}

StereoSignal Periphery::process(const StereoSignal& stimulus) const {
  MonoSignal left = process(stimulus.left);
  if (stimulus.is_diotic()) return StereoSignal(left, left);
  return StereoSignal(std::move(left), process(stimulus.right));
}

StereoSignal peripheral(const StereoSignal& stimulus) {
  return Periphery(stimulus.sample_rate()).process(stimulus);
}

InternalSignal envelope_extract(const MonoSignal& channel, double mod_freq,
                                const ModelConstants& c) {
  if (!(mod_freq > 0.0) || !(mod_freq < c.envelope_rate / 2.0))
    throw ValidationError("modulation frequency must lie in (0, 1000) Hz");
  MonoSignal env = downsample(channel, c.envelope_rate);
  if (!env.samples.empty()) {
    const double mean = std::accumulate(env.samples.begin(), env.samples.end(), 0.0) /
                        static_cast<double>(env.size());
    for (double& v : env.samples) v -= mean;
  }
  const ModulationFilter filter(mod_freq, c.mod_q, c.envelope_rate);
  return InternalSignal{filter.process(env.samples), c.envelope_rate};
}

MonoSignal monaural_pathway(const StereoSignal& internal, bool mistuned, const PathwayConfig& cfg) {
  const double fm = cfg.mod_freq(mistuned);
  MonoSignal left = magnitude(envelope_extract(internal.left, fm));
  if (internal.is_diotic()) {
    for (double& v : left.samples) v *= 2.0;
    return left;
  }
  const MonoSignal right = magnitude(envelope_extract(internal.right, fm));
  for (std::size_t i = 0; i < left.size(); ++i) left.samples[i] += right.samples[i];
  return left;
}

MonoSignal binaural_pathway(const StereoSignal& internal, bool mistuned, const PathwayConfig& cfg) {
  const double fm = cfg.mod_freq(mistuned);
  switch (cfg.order) {
    case PathwayOrder::kBinauralThenMod:
      return magnitude(envelope_extract(difference(internal.left, internal.right), fm));
    case PathwayOrder::kModThenBinaural: {
      // envelope_extract is linear, so this equals the binaural-then-mod
      // output up to rounding.
      const InternalSignal l = envelope_extract(internal.left, fm);
      const InternalSignal r = envelope_extract(internal.right, fm);
      MonoSignal out(l.samples.size(), l.sample_rate);
      for (std::size_t i = 0; i < out.size(); ++i)
        out.samples[i] = std::abs(l.samples[i] - r.samples[i]);
      return out;
    }
    case PathwayOrder::kNoModInBinaural: {
      MonoSignal d = downsample(difference(internal.left, internal.right), ModelConstants{}.envelope_rate);
      for (double& v : d.samples) v = std::abs(v);
      return d;
    }
  }
  throw ValidationError("unknown pathway order");
}

Window central_window(std::size_t n) { return Window{n / 4, (3 * n) / 4}; }

double decision_energy(const MonoSignal& pathway_out, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be >= 0");
  const Window w = central_window(pathway_out.size());
  double energy = 0.0;
  if (sigma == 0.0) {
    for (std::size_t i = w.begin; i < w.end; ++i) energy += pathway_out.samples[i] * pathway_out.samples[i];
    return energy;
  }
  std::normal_distribution<double> noise(0.0, sigma);
  for (std::size_t i = w.begin; i < w.end; ++i) {
    const double v = pathway_out.samples[i] + noise(rng);
    energy += v * v;
  }
  return energy;
}

ModelObserver::ModelObserver(PathwayConfig cfg, double sample_rate)
    : cfg_(cfg), periphery_(sample_rate) {
  validate(cfg_);
}

MonoSignal ModelObserver::pathway_output(const StereoSignal& interval,
                                         const ConditionSpec& spec) const {
  const StereoSignal internal = periphery_.process(interval);
  return spec.is_dichotic() ? binaural_pathway(internal, spec.is_mistuned(), cfg_)
                            : monaural_pathway(internal, spec.is_mistuned(), cfg_);
}

double ModelObserver::interval_energy(const StereoSignal& interval, const ConditionSpec& spec,
                                      Rng& rng) const {
  const double sigma = spec.is_dichotic() ? cfg_.sigma_b : cfg_.sigma_m;
  return decision_energy(pathway_output(interval, spec), sigma, rng);
}

int ModelObserver::choose(const TrialStimulus& trial, const ConditionSpec& spec, Rng& rng) const {
  const double e0 = interval_energy(trial.comparisons[0], spec, rng);
  const double e1 = interval_energy(trial.comparisons[1], spec, rng);
  if (e0 == e1) return uniform01(rng) < 0.5 ? 0 : 1;
  return e0 > e1 ? 0 : 1;
}

}  // namespace binharm
