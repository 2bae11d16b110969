// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#include "binharm/experiments.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "binharm/errors.hpp"
#include "binharm/parallel.hpp"

namespace binharm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

PathwayConfig with_sigma(PathwayConfig cfg, NoiseTarget target, double sigma) {
  (target == NoiseTarget::kMonaural ? cfg.sigma_m : cfg.sigma_b) = sigma;
  return cfg;
}

}  // namespace

ExperimentId parse_experiment(std::string_view name) {
  if (name == "2" || name == "exp2" || name == "Exp2") return ExperimentId::kExp2;
  if (name == "3" || name == "exp3" || name == "Exp3") return ExperimentId::kExp3;
  throw ValidationError("unknown experiment '" + std::string(name) + "' (expected 2 or 3)");
}

std::string_view to_string(ExperimentId id) {
  return id == ExperimentId::kExp2 ? "exp2" : "exp3";
}

std::string_view to_string(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::kDioticHarmonic: return "diotic-harmonic";
    case ConditionKind::kDioticMistuned: return "diotic-mistuned";
    case ConditionKind::kDichoticHarmonic: return "dichotic-harmonic";
    case ConditionKind::kDichoticMistuned: return "dichotic-mistuned";
  }
  return "unknown";
}

ConditionKind parse_condition(std::string_view name) {
  for (ConditionKind k : kAllConditions)
    if (to_string(k) == name) return k;
  throw ValidationError("unknown condition '" + std::string(name) + "'");
}

ExperimentPreset experiment_preset(ExperimentId id) {
  ConditionSpec base;
  base.f0 = 40.0;
  base.target_freq = 800.0;
  base.masker_level = 65.0;
  if (id == ExperimentId::kExp2) {
    base.n_components = 8;
  } else {
    // Broadband masker: 24 extra components at the narrowband per-component level.
    base.n_components = 32;
    base.level_reference_components = 8;
  }
  ExperimentPreset preset{id, {}};
  for (ConditionKind k : kAllConditions) {
    ConditionSpec c = base;
    const bool dichotic = k == ConditionKind::kDichoticHarmonic || k == ConditionKind::kDichoticMistuned;
    const bool mistuned = k == ConditionKind::kDioticMistuned || k == ConditionKind::kDichoticMistuned;
    c.target_ipd = dichotic ? std::numbers::pi : 0.0;
    c.mistuning_percent = mistuned ? kMistuningPercent : 0.0;
    validate(c);
    preset.conditions[static_cast<std::size_t>(k)] = c;
  }
  return preset;
}

double mean_track_threshold(const ConditionSpec& condition, PathwayConfig base, NoiseTarget target,
                            double sigma, int n_tracks, std::uint64_t seed, int jobs) {
  if (n_tracks < 1) throw ValidationError("n_tracks must be >= 1");
  const ModelObserver observer(with_sigma(base, target, sigma), condition.sample_rate);
  std::vector<double> thresholds(static_cast<std::size_t>(n_tracks), 0.0);
  std::atomic<int> overshoot{0};  // +1 above, -1 below the safe range
  parallel_for(thresholds.size(), jobs, [&](std::size_t t) {
    if (overshoot.load() != 0) return;
    Rng rng(derive_seed(seed, {t}));
    try {
      thresholds[t] = run_track(condition, observer, rng).threshold;
    } catch (const TrackAborted& e) {
      int expected = 0;
      overshoot.compare_exchange_strong(expected, e.level() > 0.0 ? 1 : -1);
    }
  });
  if (overshoot != 0) return overshoot > 0 ? kInf : -kInf;
  return mean_of(thresholds);
}

SigmaFit fit_sigma(const ConditionSpec& condition, const PathwayConfig& base, NoiseTarget target,
                   double target_threshold, std::uint64_t seed, const SigmaFitOptions& opt) {
  validate(condition);
  if (!(opt.bracket_lo > 0.0) || !(opt.bracket_hi > opt.bracket_lo))
    throw ValidationError("sigma bracket must satisfy 0 < lo < hi");
  SigmaFit fit;
  fit.target_threshold = target_threshold;
  fit.n_runs_used = opt.n_tracks;

  auto eval = [&](double sigma) {
    const double m = mean_track_threshold(condition, base, target, sigma, opt.n_tracks, seed, opt.jobs);
    fit.trace.push_back({sigma, m});
    return m;
  };
  auto accept = [&](double sigma, double m) {
    if (std::abs(m - target_threshold) <= opt.tolerance_db) {
      fit.sigma = sigma;
      fit.achieved_threshold = m;
      fit.converged = true;
      return true;
    }
    return false;
  };

  double lo = opt.bracket_lo, hi = opt.bracket_hi;
  double f_lo = eval(lo);
  if (accept(lo, f_lo)) return fit;
  for (int i = 0; f_lo > target_threshold && i < opt.max_bracket_expansions; ++i) {
    hi = lo;
    lo *= 1e-2;
    f_lo = eval(lo);
    if (accept(lo, f_lo)) return fit;
  }
  if (f_lo > target_threshold) {
    const double floor = eval(0.0);
    std::ostringstream msg;
    msg << "calibration target " << target_threshold
        << " dB SPL is unreachable: the sigma = 0 threshold floor is " << floor << " dB SPL";
    throw RuntimeError(msg.str());
  }
  double f_hi = eval(hi);
  if (accept(hi, f_hi)) return fit;
  for (int i = 0; f_hi < target_threshold && i < opt.max_bracket_expansions; ++i) {
    lo = hi;
    hi *= 1e2;
    f_hi = eval(hi);
    if (accept(hi, f_hi)) return fit;
  }
  if (f_hi < target_threshold) {
    std::ostringstream msg;
    msg << "calibration target " << target_threshold << " dB SPL is above the threshold reached at sigma = "
        << hi;
    throw RuntimeError(msg.str());
  }

  double best_sigma = lo, best_m = f_lo;
  for (int step = 0; step < opt.max_bisection_steps; ++step) {
    const double mid = std::sqrt(lo * hi);
    const double m = eval(mid);
    if (accept(mid, m)) return fit;
    if (std::abs(m - target_threshold) < std::abs(best_m - target_threshold)) {
      best_sigma = mid;
      best_m = m;
    }
    (m < target_threshold ? lo : hi) = mid;
  }
  fit.sigma = best_sigma;
  fit.achieved_threshold = best_m;
  fit.converged = false;
  return fit;
}

double masking_release(const ThresholdResult& mistuned, const ThresholdResult& harmonic) {
  const ConditionSpec& m = mistuned.condition;
  const ConditionSpec& h = harmonic.condition;
  if (m.f0 != h.f0 || m.n_components != h.n_components || m.target_ipd != h.target_ipd ||
      m.target_freq != h.target_freq || m.masker_level != h.masker_level)
    throw ValidationError("masking release needs two conditions of one experiment with the same ipd");
  return harmonic.mean_threshold - mistuned.mean_threshold;
}

double bmld(const ThresholdResult& diotic, const ThresholdResult& dichotic) {
  const ConditionSpec& a = diotic.condition;
  const ConditionSpec& b = dichotic.condition;
  if (a.f0 != b.f0 || a.n_components != b.n_components || a.mistuning_percent != b.mistuning_percent ||
      a.target_freq != b.target_freq || a.masker_level != b.masker_level)
    throw ValidationError("BMLD needs two conditions of one experiment with the same mistuning");
  return diotic.mean_threshold - dichotic.mean_threshold;
}

ExperimentResult run_experiment(const ExperimentPreset& preset, const PathwayConfig& pathway,
                                std::uint64_t seed, const ExperimentOptions& opt) {
  if (opt.n_threshold_samples < 1 || opt.runs_per_threshold < 1)
    throw ValidationError("sample and run counts must be >= 1");
  validate(pathway);
  const ModelObserver observer(pathway);
  const auto n = static_cast<std::size_t>(opt.n_threshold_samples);
  ExperimentResult result;
  result.experiment = preset.id;
  result.pathway = pathway;
  for (std::size_t k = 0; k < 4; ++k) {
    result.conditions[k].kind = kAllConditions[k];
    result.conditions[k].samples.resize(n);
  }
  const TrialOptions trial_options{opt.background_noise};
  parallel_for(4 * n, opt.jobs, [&](std::size_t job) {
    const std::size_t k = job / n, i = job % n;
    const std::uint64_t s =
        derive_seed(seed, {static_cast<std::uint64_t>(preset.id), k, i});
    result.conditions[k].samples[i] = run_condition(preset.conditions[k], observer,
                                                    opt.runs_per_threshold, s, {}, trial_options);
  });
  for (auto& c : result.conditions) {
    std::vector<double> means;
    for (const auto& r : c.samples) means.push_back(r.mean_threshold);
    c.mean = mean_of(means);
    c.std = std_of(means);
  }
  auto at = [&](ConditionKind k) -> const ConditionSummary& { return result.condition(k); };
  result.release_diotic = at(ConditionKind::kDioticHarmonic).mean - at(ConditionKind::kDioticMistuned).mean;
  result.release_dichotic =
      at(ConditionKind::kDichoticHarmonic).mean - at(ConditionKind::kDichoticMistuned).mean;
  result.bmld_harmonic = at(ConditionKind::kDioticHarmonic).mean - at(ConditionKind::kDichoticHarmonic).mean;
  result.bmld_mistuned = at(ConditionKind::kDioticMistuned).mean - at(ConditionKind::kDichoticMistuned).mean;
  for (std::size_t i = 0; i < n; ++i) {
    result.release_diotic_samples.push_back(
        masking_release(at(ConditionKind::kDioticMistuned).samples[i], at(ConditionKind::kDioticHarmonic).samples[i]));
    result.release_dichotic_samples.push_back(masking_release(
        at(ConditionKind::kDichoticMistuned).samples[i], at(ConditionKind::kDichoticHarmonic).samples[i]));
  }
  return result;
}

}  // namespace binharm
