// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0
//
// 1-up/2-down adaptive tracking for a 3-interval, 2-alternative
// forced-choice task.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "binharm/errors.hpp"
#include "binharm/psychophysics_fwd.hpp"
#include "binharm/rng.hpp"
#include "binharm/stimulus.hpp"

namespace binharm {

enum class Direction { kNone, kUp, kDown };

struct StaircaseConfig {
  double start_level = 65.0;
  double initial_step = 5.0;
  // Step sizes taking effect once the reversal count reaches the given value.
  std::vector<std::pair<int, double>> step_schedule = {{2, 2.0}, {4, 1.0}};
  int final_reversals = 8;  // reversals at the final step before stopping
  double min_level = -40.0;
  double max_level = 100.0;

  double final_step() const {
    return step_schedule.empty() ? initial_step : step_schedule.back().second;
  }
};

struct Reversal {
  int trial;
  double level;
  double step;  // step in force when the reversal happened
};

struct TrialRecord {
  int trial;     // 1-based
  double level;  // level presented
  bool correct;
  double step;   // step size used for the level change this trial triggered
  bool reversal;
};

struct StaircaseState {
  double current_level = 65.0;
  double step = 5.0;
  int consecutive_correct = 0;
  std::vector<Reversal> reversals;
  int trial_count = 0;
  Direction last_direction = Direction::kNone;
  bool terminated = false;
  std::vector<TrialRecord> history;

  int final_step_reversals(const StaircaseConfig& cfg) const;
  // Mean level over the last `final_reversals` reversals.
  double threshold(const StaircaseConfig& cfg) const;
};

StaircaseState start_staircase(const StaircaseConfig& cfg = {});

// Scores one response at the current level. Throws ValidationError when the
// track is already terminated and TrackAborted when the next level would
// leave [min_level, max_level].
StaircaseState staircase_step(StaircaseState state, bool correct, const StaircaseConfig& cfg = {});

class TrackAborted : public RuntimeError {
 public:
  TrackAborted(const std::string& what, double level) : RuntimeError(what), level_(level) {}
  double level() const { return level_; }

 private:
  double level_;
};

struct TrackResult {
  double threshold;
  StaircaseState state;
};

// Drives a track from a level -> correct? callback.
using ResponseFn = std::function<bool(double level)>;
TrackResult run_track(const ResponseFn& respond, const StaircaseConfig& cfg = {});

// Fresh trial per step: assemble_trial at the current level, observer's choice scored.
TrackResult run_track(const ConditionSpec& spec, const Observer& observer, Rng& rng,
                      const StaircaseConfig& cfg = {}, const TrialOptions& options = {});

struct ThresholdResult {
  std::vector<double> per_run_thresholds;
  double mean_threshold = 0.0;
  double relative_threshold = 0.0;  // mean - masker level
  ConditionSpec condition;
};

// n_runs independent tracks; run r uses Rng(derive_seed(seed, {r})).
ThresholdResult run_condition(const ConditionSpec& spec, const Observer& observer, int n_runs,
                              std::uint64_t seed, const StaircaseConfig& cfg = {},
                              const TrialOptions& options = {});

// Per-trial CSV: trial,level,correct,step,reversal
void write_track_log(std::ostream& out, const StaircaseState& state);

}  // namespace binharm
