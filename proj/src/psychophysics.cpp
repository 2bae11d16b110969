// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#include "binharm/psychophysics.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>

#include "binharm/errors.hpp"

namespace binharm {

int StaircaseState::final_step_reversals(const StaircaseConfig& cfg) const {
  const double fin = cfg.final_step();
  return static_cast<int>(std::count_if(reversals.begin(), reversals.end(),
                                        [fin](const Reversal& r) { return r.step == fin; }));
}

double StaircaseState::threshold(const StaircaseConfig& cfg) const {
  const auto n = static_cast<std::size_t>(cfg.final_reversals);
  if (reversals.size() < n || n == 0) throw ValidationError("not enough reversals for a threshold");
  double sum = 0.0;
  for (auto it = reversals.end() - static_cast<std::ptrdiff_t>(n); it != reversals.end(); ++it)
    sum += it->level;
  return sum / static_cast<double>(n);
}

StaircaseState start_staircase(const StaircaseConfig& cfg) {
  StaircaseState s;
  s.current_level = cfg.start_level;
  s.step = cfg.initial_step;
  return s;
}

StaircaseState staircase_step(StaircaseState s, bool correct, const StaircaseConfig& cfg) {
  if (s.terminated) throw ValidationError("staircase already terminated");
  const double level = s.current_level;
  ++s.trial_count;

  Direction move = Direction::kNone;
  if (correct) {
    if (++s.consecutive_correct == 2) {
      move = Direction::kDown;
      s.consecutive_correct = 0;
    }
  } else {
    move = Direction::kUp;
    s.consecutive_correct = 0;
  }

  bool reversal = false;
  if (move != Direction::kNone) {
    if (s.last_direction != Direction::kNone && move != s.last_direction) {
      reversal = true;
      s.reversals.push_back(Reversal{s.trial_count, level, s.step});
      const int count = static_cast<int>(s.reversals.size());
      for (const auto& [after, step] : cfg.step_schedule)
        if (count >= after) s.step = step;
    }
    s.current_level = level + (move == Direction::kDown ? -s.step : s.step);
    s.last_direction = move;
  }
  s.history.push_back(TrialRecord{s.trial_count, level, correct, s.step, reversal});

  if (s.final_step_reversals(cfg) >= cfg.final_reversals) {
    s.terminated = true;
    return s;
  }
  if (s.current_level > cfg.max_level || s.current_level < cfg.min_level) {
    std::ostringstream msg;
    msg << "track left the safe level range [" << cfg.min_level << ", " << cfg.max_level
        << "] dB SPL at trial " << s.trial_count << " (level " << s.current_level << ")";
    throw TrackAborted(msg.str(), s.current_level);
  }
  return s;
}

TrackResult run_track(const ResponseFn& respond, const StaircaseConfig& cfg) {
  StaircaseState s = start_staircase(cfg);
  while (!s.terminated) s = staircase_step(std::move(s), respond(s.current_level), cfg);
  const double threshold = s.threshold(cfg);
  return TrackResult{threshold, std::move(s)};
}

TrackResult run_track(const ConditionSpec& spec, const Observer& observer, Rng& rng,
                      const StaircaseConfig& cfg, const TrialOptions& options) {
  validate(spec);
  return run_track(
      [&](double level) {
        const TrialStimulus trial = assemble_trial(spec, level, rng, options);
        return observer.choose(trial, spec, rng) == trial.target_position;
      },
      cfg);
}

ThresholdResult run_condition(const ConditionSpec& spec, const Observer& observer, int n_runs,
                              std::uint64_t seed, const StaircaseConfig& cfg,
                              const TrialOptions& options) {
  if (n_runs < 1) throw ValidationError("n_runs must be >= 1");
  ThresholdResult result;
  result.condition = spec;
  for (int r = 0; r < n_runs; ++r) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
    result.per_run_thresholds.push_back(run_track(spec, observer, rng, cfg, options).threshold);
  }
  result.mean_threshold = std::accumulate(result.per_run_thresholds.begin(),
                                          result.per_run_thresholds.end(), 0.0) /
                          static_cast<double>(n_runs);
  result.relative_threshold = result.mean_threshold - spec.masker_level;
  return result;
}

void write_track_log(std::ostream& out, const StaircaseState& state) {
  out << "trial,level,correct,step,reversal\n";
  for (const TrialRecord& t : state.history)
    out << t.trial << ',' << t.level << ',' << (t.correct ? 1 : 0) << ',' << t.step << ','
        << (t.reversal ? 1 : 0) << '\n';
}

}  // namespace binharm
