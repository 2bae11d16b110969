// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "binharm/errors.hpp"
#include "binharm/model.hpp"
#include "binharm/psychophysics.hpp"

using namespace binharm;

namespace {

// Correct with probability 0.5 + 0.5 * logistic((L - mu) / s).
struct Logistic {
  double mu, s;
  double p(double level) const { return 0.5 + 0.5 / (1.0 + std::exp(-(level - mu) / s)); }
};

class CoinObserver final : public Observer {
 public:
  int choose(const TrialStimulus&, const ConditionSpec&, Rng& rng) const override {
    return uniform01(rng) < 0.5 ? 0 : 1;
  }
};

}  // namespace

TEST_SUITE("psychophysics") {

TEST_CASE("first steps") {
  StaircaseState s = start_staircase();
  CHECK(s.current_level == 65.0);
  s = staircase_step(s, true);
  CHECK(s.current_level == 65.0);
  s = staircase_step(s, true);
  CHECK(s.current_level == 60.0);
  CHECK(s.reversals.empty());
  s = staircase_step(s, false);
  CHECK(s.current_level == 65.0);
  REQUIRE(s.reversals.size() == 1);
  CHECK(s.reversals[0].level == 60.0);
  CHECK(s.reversals[0].trial == 3);
  CHECK(s.consecutive_correct == 0);
}

TEST_CASE("deterministic observer walks the hand-computed lattice") {
  const std::vector<double> expected_levels = {65, 65, 60, 60, 55, 55, 50, 50, 45, 45, 40, 45, 45, 43, 43,
                                               41, 43, 43, 42, 43, 43, 42, 43, 43, 42, 43, 43, 42, 43, 43};
  const std::vector<double> expected_reversals = {40, 45, 41, 43, 42, 43, 42, 43, 42, 43, 42, 43};
  const std::vector<double> expected_steps = {5, 5, 2, 2, 1, 1, 1, 1, 1, 1, 1, 1};
  const TrackResult r = run_track([](double level) { return level >= 43.0; });
  std::vector<double> levels;
  for (const auto& t : r.state.history) levels.push_back(t.level);
  CHECK(levels == expected_levels);
  REQUIRE(r.state.reversals.size() == expected_reversals.size());
  for (std::size_t i = 0; i < expected_reversals.size(); ++i) {
    CHECK(r.state.reversals[i].level == expected_reversals[i]);
    CHECK(r.state.reversals[i].step == expected_steps[i]);
  }
  CHECK(r.threshold == 42.5);
  CHECK(r.state.terminated);
  CHECK_THROWS_AS(staircase_step(r.state, true), ValidationError);
}

TEST_CASE("logistic observer converges near its 70.7% point") {
  const Logistic obs{40.0, 2.0};
  const double p707 = obs.mu + obs.s * std::log((std::sqrt(0.5) - 0.5) / (1.0 - std::sqrt(0.5)));
  CHECK(obs.p(p707) == doctest::Approx(std::sqrt(0.5)));
  CHECK(p707 == doctest::Approx(39.307).epsilon(1e-4));
  Rng rng(77);
  double sum = 0.0;
  const int n = 400;
  for (int i = 0; i < n; ++i)
    sum += run_track([&](double level) { return uniform01(rng) < obs.p(level); }).threshold;
  CHECK(sum / n == doctest::Approx(p707).epsilon(0.75 / 39.3));
}

TEST_CASE("always-correct observer trips the floor guard") {
  try {
    run_track([](double) { return true; });
    FAIL("expected TrackAborted");
  } catch (const TrackAborted& e) {
    CHECK(e.level() < -40.0);
  }
  CHECK_THROWS_AS(run_track([](double) { return false; }), TrackAborted);
}

TEST_CASE("chance observer always terminates") {
  const CoinObserver coin;
  const ConditionSpec spec;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    int trials = 0;
    try {
      trials = run_track(spec, coin, rng).state.trial_count;
    } catch (const TrackAborted&) {
      trials = -1;
    }
    CHECK(trials != 0);
  }
}

TEST_CASE("run_condition: run r is the track seeded with derive_seed(seed, r)") {
  PathwayConfig cfg;
  cfg.sigma_m = 0.01;
  const ModelObserver obs(cfg);
  const ConditionSpec spec;
  const ThresholdResult r = run_condition(spec, obs, 3, 99);
  REQUIRE(r.per_run_thresholds.size() == 3);
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    Rng rng(derive_seed(99, {static_cast<std::uint64_t>(k)}));
    const double t = run_track(spec, obs, rng).threshold;
    CHECK(r.per_run_thresholds[static_cast<std::size_t>(k)] == t);
    sum += t;
  }
  CHECK(r.mean_threshold == doctest::Approx(sum / 3.0));
  CHECK(r.relative_threshold == doctest::Approx(r.mean_threshold - 65.0));
  CHECK(r.condition == spec);
  CHECK_THROWS_AS(run_condition(spec, obs, 0, 1), ValidationError);
}

TEST_CASE("track log") {
  const TrackResult r = run_track([](double level) { return level >= 43.0; });
  std::ostringstream out;
  write_track_log(out, r.state);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "trial,level,correct,step,reversal");
  std::getline(in, line);
  CHECK(line == "1,65,1,5,0");
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 30);
}

}
