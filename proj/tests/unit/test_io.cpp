// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "binharm/app.hpp"
#include "binharm/errors.hpp"
#include "binharm/serialize.hpp"
#include "binharm/wav.hpp"

using namespace binharm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("binharm_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("wav round trip at 24-bit resolution") {
  ConditionSpec spec;
  Rng rng(1);
  const StereoSignal s = assemble_trial(spec, 60.0, rng).reference;
  const std::string bytes = encode_wav(s);
  CHECK(bytes.size() == 44 + s.size() * 6);
  CHECK(bytes.substr(0, 4) == "RIFF");
  const StereoSignal back = decode_wav(bytes);
  REQUIRE(back.size() == s.size());
  CHECK(back.sample_rate() == 48000.0);
  for (std::size_t i = 0; i < s.size(); ++i) REQUIRE(std::abs(back.left[i] - s.left[i]) <= 0.5 / 8388607.0 + 1e-15);
  CHECK(encode_wav(back) == bytes);
  CHECK_THROWS_AS(decode_wav("RIFF"), ValidationError);
}

TEST_CASE("condition JSON round trip and unknown keys") {
  ConditionSpec s;
  s.mistuning_percent = 2.64;
  s.target_ipd = std::numbers::pi;
  const nlohmann::json j = s;
  CHECK(j.get<ConditionSpec>() == s);
  nlohmann::json bad = j;
  bad["colour"] = 1;
  CHECK_THROWS_AS(bad.get<ConditionSpec>(), ValidationError);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(INFINITY) == "inf");
}

TEST_CASE("run config: file layering, round trip, missing sigma") {
  RunConfig c;
  c.sigma_m = 0.01;
  c.sigma_b[PathwayOrder::kNoModInBinaural] = 0.02;
  c.seed = 7;
  c.threshold_samples = 5;
  RunConfig d;
  merge_json(to_json(c), d);
  CHECK(to_json(d) == to_json(c));
  CHECK(d.pathway(PathwayOrder::kNoModInBinaural).sigma_b == 0.02);
  CHECK_THROWS_AS(d.pathway(PathwayOrder::kBinauralThenMod), ValidationError);
  CHECK_THROWS_AS(RunConfig{}.pathway(PathwayOrder::kBinauralThenMod), ValidationError);
  RunConfig e;
  merge_json(nlohmann::json{{"seed", 3}}, e);
  CHECK(e.seed == 3);
  CHECK(e.threshold_samples == 20);
  CHECK_THROWS_AS(merge_json(nlohmann::json{{"sed", 3}}, e), ValidationError);
  CHECK_THROWS_AS(merge_json(nlohmann::json{{"seed", "x"}}, e), ValidationError);
  CHECK_FALSE(to_json(c).contains("output_dir"));
  CHECK_FALSE(to_json(c).contains("jobs"));
}

TEST_CASE("synth: one interval or a full trial with gaps") {
  SynthRequest req;
  req.level = 55.0;
  req.seed = 4;
  const StereoSignal all = synth_signal(req);
  CHECK(all.size() == 3 * 19200 + 2 * 14400);
  req.interval = 2;
  const StereoSignal two = synth_signal(req);
  CHECK(two.size() == 19200);
  for (std::size_t i = 0; i < two.size(); ++i) REQUIRE(two.left[i] == all.left[19200 + 14400 + i]);
  const TrialStimulus t = session_trial(req.spec, 55.0, 4, 1);
  CHECK(t.comparisons[0].left.samples == two.left.samples);
  req.interval = 4;
  CHECK_THROWS_AS(synth_signal(req), ValidationError);

  const fs::path dir = scratch("synth");
  req.interval = 1;
  cmd_synth(req, dir / "a.wav");
  cmd_synth(req, dir / "b.wav");
  CHECK(slurp(dir / "a.wav") == slurp(dir / "b.wav"));
  CHECK(read_wav(dir / "a.wav").size() == 19200);
  req.spec.n_components = 7;
  CHECK_THROWS_AS(cmd_synth(req, dir / "c.wav"), ValidationError);
}

TEST_CASE("simulate, regenerate from the embedded config, report") {
  const fs::path dir = scratch("simulate");
  RunConfig c;
  c.experiments = {ExperimentId::kExp2};
  c.orders = {PathwayOrder::kNoModInBinaural};
  c.sigma_m = 0.012;
  c.sigma_b[PathwayOrder::kNoModInBinaural] = 0.008;
  c.threshold_samples = 2;
  c.runs_per_threshold = 1;
  c.output_dir = dir / "a";
  const auto out = cmd_simulate(c);
  REQUIRE(out.size() == 1);

  std::ifstream csv(out[0].csv);
  std::string first, header;
  std::getline(csv, first);
  std::getline(csv, header);
  CHECK(first.rfind("# run_config: ", 0) == 0);
  CHECK(header == "experiment,config,ipd,mistuning,sample,threshold_db");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == 4 * 2);

  const auto summary = nlohmann::json::parse(slurp(out[0].json));
  RunConfig again;
  merge_json(summary.at("run_config"), again);
  again.output_dir = dir / "b";
  const auto out2 = cmd_simulate(again);
  CHECK(slurp(out2[0].json) == slurp(out[0].json));
  CHECK(slurp(out2[0].csv) == slurp(out[0].csv));

  const Report r = cmd_report({out[0].json}, dir / "report");
  CHECK(r.rows.size() == 8);
  int conditions = 0, releases = 0, bmlds = 0;
  for (const auto& row : r.rows) {
    conditions += row.kind == "condition";
    releases += row.kind == "release";
    bmlds += row.kind == "bmld";
  }
  CHECK(conditions == 4);
  CHECK(releases == 2);
  CHECK(bmlds == 2);
  CHECK(r.rows[4].human == 5.8);
  CHECK(r.rows[6].human == 8.0);
  CHECK(fs::exists(r.plot_csv));

  std::ofstream(dir / "junk.json") << "{\"experiment\": \"exp2\"}";
  CHECK_THROWS_AS(cmd_report({dir / "junk.json"}, dir / "report"), ValidationError);
  CHECK_THROWS_AS(cmd_report({}, dir / "report"), ValidationError);

  c.sigma_m.reset();
  CHECK_THROWS_AS(cmd_simulate(c), ValidationError);
}

TEST_CASE("report groups by experiment") {
  auto doc = [](const char* exp) {
    nlohmann::json conds = nlohmann::json::array();
    for (ConditionKind k : kAllConditions)
      conds.push_back({{"name", std::string(to_string(k))}, {"mean_threshold", 50.0}, {"std", 1.0},
                       {"samples", {50.0, 50.0}}});
    return nlohmann::json{{"experiment", exp},
                          {"pathway", {{"order", "no-mod-in-binaural"}}},
                          {"conditions", conds},
                          {"release", {{"diotic", 1.0}, {"dichotic", 0.0}, {"diotic_std", 0.1}, {"dichotic_std", 0.1}}},
                          {"bmld", {{"harmonic", 9.0}, {"mistuned", 3.0}}}};
  };
  const fs::path dir = scratch("report");
  std::ofstream(dir / "e3.json") << doc("exp3").dump();
  std::ofstream(dir / "e2.json") << doc("exp2").dump();
  const Report r = cmd_report({dir / "e3.json", dir / "e2.json"}, dir);
  REQUIRE(r.rows.size() == 16);
  CHECK(r.rows.front().experiment == "exp2");
  CHECK(r.rows.back().experiment == "exp3");
  CHECK(r.rows[8 + 5].human == 0.5);
  CHECK(r.rows[8 + 7].human == 5.0);
}

TEST_CASE("internal dumps") {
  const fs::path dir = scratch("dump");
  PathwayConfig p;
  const auto files = dump_internals(experiment_preset(ExperimentId::kExp2), p, 55.0, 1, dir);
  CHECK(files.size() == 20);
  std::ifstream f(files.front());
  std::string header;
  std::getline(f, header);
  CHECK(header == "time,value");
}

}
