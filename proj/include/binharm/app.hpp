// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0
//
// The operations behind the `binharm` command line: stimulus export,
// simulation, calibration and reporting. Each output file embeds the
// configuration that produced it.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "binharm/experiments.hpp"

namespace binharm {

inline constexpr const char* kOutputDirEnv = "BINHARM_OUT_DIR";

struct RunConfig {
  std::vector<ExperimentId> experiments = {ExperimentId::kExp2, ExperimentId::kExp3};
  std::vector<PathwayOrder> orders = {std::begin(kAllPathwayOrders), std::end(kAllPathwayOrders)};
  std::optional<double> sigma_m;
  std::map<PathwayOrder, double> sigma_b;
  std::uint64_t seed = 1;
  int threshold_samples = 20;
  int runs_per_threshold = 5;
  bool background_noise = false;
  bool dump_internals = false;
  CalibrationAnchors anchors;
  int calibration_tracks = 100;
  double mod_freq_harmonic = 40.0;
  double mod_freq_mistuned = 20.0;

  // Not part of provenance: where files go and how many threads compute them.
  std::filesystem::path output_dir = ".";
  int jobs = 1;

  PathwayConfig pathway(PathwayOrder order) const;  // throws if a sigma is missing
};

nlohmann::json to_json(const RunConfig& cfg);
// Keys absent from `j` keep the values already in `cfg` (so a config file can
// be layered under command-line flags).
void merge_json(const nlohmann::json& j, RunConfig& cfg);
RunConfig load_run_config(const std::filesystem::path& path);

// Fills sigma_m / sigma_b from a calibration file written by cmd_calibrate.
void apply_sigma_file(const std::filesystem::path& path, RunConfig& cfg);

struct SynthRequest {
  ConditionSpec spec;
  double level = 65.0;        // target level, dB SPL (-inf: no target)
  std::uint64_t seed = 1;
  int trial = 1;              // trial number; selects the RNG stream
  int interval = 0;           // 1..3 for one interval, 0 for all three with gaps
  double isi = 0.3;           // gap between intervals when interval == 0, seconds
  bool background_noise = false;
};

// The trial a listening session with `seed` presents as trial number `trial`.
TrialStimulus session_trial(const ConditionSpec& spec, double level, std::uint64_t seed, int trial,
                            const TrialOptions& options = {});
StereoSignal synth_signal(const SynthRequest& req);
void cmd_synth(const SynthRequest& req, const std::filesystem::path& out_path);

struct SimulationOutput {
  ExperimentId experiment;
  PathwayOrder order;
  std::filesystem::path csv;
  std::filesystem::path json;
  ExperimentResult result;
};

// One CSV + JSON pair per (experiment, order) in cfg.output_dir.
std::vector<SimulationOutput> cmd_simulate(const RunConfig& cfg);

struct CalibrationOutput {
  SigmaFit monaural;
  std::map<PathwayOrder, SigmaFit> binaural;
  std::filesystem::path path;
};

// Fits sigma_m on the Exp-2 diotic harmonic condition and sigma_b per order
// on the Exp-2 dichotic harmonic condition; writes sigma_fits.json.
CalibrationOutput cmd_calibrate(const RunConfig& cfg);

struct ReportRow {
  std::string experiment;
  std::string config;
  std::string kind;  // condition | release | bmld
  std::string name;
  double model_mean;
  double model_std;
  std::optional<double> human;
};

struct Report {
  std::vector<ReportRow> rows;
  std::filesystem::path table_csv;
  std::filesystem::path plot_csv;
};

// Reads simulate JSON summaries and writes report_table.csv and
// release_plot_data.csv into out_dir. Rows are grouped by experiment.
Report cmd_report(const std::vector<std::filesystem::path>& results,
                  const std::filesystem::path& out_dir);

// Stage-by-stage CSV (time, value) dumps of one interval per condition.
std::vector<std::filesystem::path> dump_internals(const ExperimentPreset& preset,
                                                  const PathwayConfig& pathway, double level,
                                                  std::uint64_t seed,
                                                  const std::filesystem::path& dir);

}  // namespace binharm
