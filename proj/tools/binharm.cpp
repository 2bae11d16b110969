// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0
//
// binharm: synth | simulate | calibrate | report | serve
// Exit status: 0 ok, 1 invalid input, 2 runtime failure.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>
#include <httplib.h>

#include "binharm/app.hpp"
#include "binharm/errors.hpp"
#include "binharm/parallel.hpp"
#include "binharm/serialize.hpp"
#include "binharm/service.hpp"

namespace fs = std::filesystem;
using namespace binharm;

namespace {

fs::path default_out_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  return env && *env ? fs::path(env) : fs::path(".");
}

struct SpecFlags {
  std::string experiment = "2";
  std::string condition = "diotic-harmonic";
  std::string spec_file;
  std::optional<double> f0, mistuning, masker_level, target_freq, ipd_deg;
  std::optional<int> n_components;

  void add(CLI::App* cmd) {
    cmd->add_option("--exp", experiment, "Experiment preset (2 or 3)")->capture_default_str();
    cmd->add_option("--condition", condition,
                    "diotic-harmonic | diotic-mistuned | dichotic-harmonic | dichotic-mistuned")
        ->capture_default_str();
    cmd->add_option("--spec", spec_file, "JSON condition overrides applied to the preset");
    cmd->add_option("--f0", f0, "Masker fundamental, Hz");
    cmd->add_option("--mistuning", mistuning, "Mistuning, percent");
    cmd->add_option("--n-components", n_components, "Number of masker components");
    cmd->add_option("--target-freq", target_freq, "Target frequency, Hz");
    cmd->add_option("--ipd", ipd_deg, "Target interaural phase difference, degrees");
    cmd->add_option("--masker-level", masker_level, "Masker level, dB SPL");
  }

  ConditionSpec resolve() const {
    ConditionSpec s = experiment_preset(parse_experiment(experiment)).condition(parse_condition(condition));
    if (!spec_file.empty()) {
      std::ifstream f(spec_file);
      if (!f) throw RuntimeError("cannot open " + spec_file);
      nlohmann::json j = s;
      try {
        j.update(nlohmann::json::parse(f));
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed spec file: " + std::string(e.what()));
      }
      s = j.get<ConditionSpec>();
    }
    if (f0) s.f0 = *f0;
    if (mistuning) s.mistuning_percent = *mistuning;
    if (n_components) s.n_components = *n_components;
    if (target_freq) s.target_freq = *target_freq;
    if (ipd_deg) s.target_ipd = *ipd_deg * std::numbers::pi / 180.0;
    if (masker_level) s.masker_level = *masker_level;
    validate(s);
    return s;
  }
};

// Flags for the run configuration; only options given on the command line
// override the config file.
struct RunFlags {
  std::string config_file;
  std::vector<std::string> experiments;
  std::vector<std::string> orders;
  std::string sigmas_file;
  std::optional<double> sigma_m;
  std::vector<std::string> sigma_b;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples, runs, tracks;
  std::optional<bool> noise;
  bool dump = false;
  bool fit = false;
  std::optional<double> anchor_diotic, anchor_dichotic;
  std::string out;
  int jobs = default_jobs();

  void add(CLI::App* cmd, bool simulate) {
    cmd->add_option("--config", config_file, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--order", orders, "Pathway order(s), or 'all'");
    cmd->add_option("--seed", seed, "Master seed");
    cmd->add_option("--jobs,-j", jobs, "Worker threads")->capture_default_str();
    cmd->add_option("--out,-o", out, std::string("Output directory (default $") + kOutputDirEnv + " or .)");
    cmd->add_option("--tracks", tracks, "Tracks per calibration step");
    cmd->add_option("--anchor-diotic", anchor_diotic, "Diotic harmonic target, dB re masker");
    cmd->add_option("--anchor-dichotic", anchor_dichotic, "Dichotic harmonic target, dB re masker");
    if (!simulate) return;
    cmd->add_option("--exp", experiments, "Experiment(s): 2, 3");
    cmd->add_option("--sigmas", sigmas_file, "sigma_fits.json from calibrate")->check(CLI::ExistingFile);
    cmd->add_option("--sigma-m", sigma_m, "Monaural internal noise");
    cmd->add_option("--sigma-b", sigma_b, "Binaural internal noise: VALUE or ORDER=VALUE");
    cmd->add_flag("--fit", fit, "Calibrate missing sigmas before simulating");
    cmd->add_option("--samples", samples, "Threshold samples per condition");
    cmd->add_option("--runs", runs, "Tracks per threshold sample");
    cmd->add_flag("--noise,!--no-noise", noise, "Background noise in model trials");
    cmd->add_flag("--dump-internals", dump, "Write stage-by-stage CSV dumps");
  }

  RunConfig resolve() const {
    RunConfig c;
    if (!config_file.empty()) c = load_run_config(config_file);
    if (!sigmas_file.empty()) apply_sigma_file(sigmas_file, c);
    if (!experiments.empty()) {
      c.experiments.clear();
      for (const auto& e : experiments) c.experiments.push_back(parse_experiment(e));
    }
    if (!orders.empty()) {
      c.orders.clear();
      for (const auto& o : orders) {
        if (o == "all") c.orders.assign(std::begin(kAllPathwayOrders), std::end(kAllPathwayOrders));
        else c.orders.push_back(parse_pathway_order(o));
      }
    }
    if (sigma_m) c.sigma_m = *sigma_m;
    for (const auto& sb : sigma_b) {
      const auto eq = sb.find('=');
      try {
        if (eq == std::string::npos) {
          for (PathwayOrder o : c.orders) c.sigma_b[o] = std::stod(sb);
        } else {
          c.sigma_b[parse_pathway_order(sb.substr(0, eq))] = std::stod(sb.substr(eq + 1));
        }
      } catch (const std::logic_error&) {
        throw ValidationError("bad --sigma-b value '" + sb + "'");
      }
    }
    if (seed) c.seed = *seed;
    if (samples) c.threshold_samples = *samples;
    if (runs) c.runs_per_threshold = *runs;
    if (tracks) c.calibration_tracks = *tracks;
    if (noise) c.background_noise = *noise;
    if (dump) c.dump_internals = true;
    if (anchor_diotic) c.anchors.diotic_harmonic_relative = *anchor_diotic;
    if (anchor_dichotic) c.anchors.dichotic_harmonic_relative = *anchor_dichotic;
    if (!out.empty()) c.output_dir = out;
    else if (c.output_dir == ".") c.output_dir = default_out_dir();
    c.jobs = jobs;
    if (c.threshold_samples < 1 || c.runs_per_threshold < 1 || c.calibration_tracks < 1)
      throw ValidationError("sample, run and track counts must be >= 1");
    return c;
  }
};

bool sigmas_complete(const RunConfig& c) {
  if (!c.sigma_m) return false;
  for (PathwayOrder o : c.orders)
    if (!c.sigma_b.contains(o)) return false;
  return true;
}

void print_fit(const std::string& name, const SigmaFit& f) {
  std::cout << name << ": sigma=" << format_double(f.sigma) << " threshold=" << format_double(f.achieved_threshold)
            << " target=" << format_double(f.target_threshold) << (f.converged ? "" : " (not converged)") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Auditory model of binaural masking release by harmonicity"};
  app.require_subcommand(1);

  SpecFlags synth_spec;
  SynthRequest synth;
  std::string synth_out;
  auto* cmd_s = app.add_subcommand("synth", "Write one trial (or one interval) as a WAV file");
  synth_spec.add(cmd_s);
  cmd_s->add_option("--level", synth.level, "Target level, dB SPL")->capture_default_str();
  cmd_s->add_option("--seed", synth.seed, "Session seed")->capture_default_str();
  cmd_s->add_option("--trial", synth.trial, "Trial number within the session")->capture_default_str();
  cmd_s->add_option("--interval", synth.interval, "1..3, or 0 for the whole trial")->capture_default_str();
  cmd_s->add_option("--isi", synth.isi, "Gap between intervals, seconds")->capture_default_str();
  cmd_s->add_flag("--noise", synth.background_noise, "Add background noise");
  cmd_s->add_option("--out,-o", synth_out, "Output WAV path");

  RunFlags sim_flags;
  auto* cmd_m = app.add_subcommand("simulate", "Run the model experiments");
  sim_flags.add(cmd_m, true);

  RunFlags cal_flags;
  auto* cmd_c = app.add_subcommand("calibrate", "Fit the internal-noise parameters");
  cal_flags.add(cmd_c, false);

  std::vector<std::string> report_inputs;
  std::string report_out;
  auto* cmd_r = app.add_subcommand("report", "Summarize simulate results");
  cmd_r->add_option("results", report_inputs, "JSON summaries from simulate")->required()->check(CLI::ExistingFile);
  cmd_r->add_option("--out,-o", report_out, "Output directory");

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string snapshots;
  ServiceOptions service_options;
  auto* cmd_v = app.add_subcommand("serve", "Run the listening-session HTTP service");
  cmd_v->add_option("--host", host)->capture_default_str();
  cmd_v->add_option("--port", port)->capture_default_str();
  cmd_v->add_option("--snapshots", snapshots, "Directory for session snapshots; existing ones are resumed");
  cmd_v->add_option("--isi-ms", service_options.isi_ms, "Declared gap between intervals")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*cmd_s) {
      synth.spec = synth_spec.resolve();
      const fs::path out = synth_out.empty() ? default_out_dir() / "synth.wav" : fs::path(synth_out);
      cmd_synth(synth, out);
      std::cout << out.string() << '\n';
    } else if (*cmd_m) {
      RunConfig cfg = sim_flags.resolve();
      if (!sigmas_complete(cfg)) {
        if (!sim_flags.fit)
          for (PathwayOrder o : cfg.orders) cfg.pathway(o);  // throws naming the missing sigma
        const CalibrationOutput fit = cmd_calibrate(cfg);
        if (!cfg.sigma_m) cfg.sigma_m = fit.monaural.sigma;
        for (const auto& [o, f] : fit.binaural) cfg.sigma_b.try_emplace(o, f.sigma);
        std::cerr << "calibrated: " << fit.path.string() << '\n';
      }
      for (const auto& r : cmd_simulate(cfg)) {
        std::cout << to_string(r.experiment) << ' ' << to_string(r.order)
                  << ": release diotic=" << format_double(r.result.release_diotic)
                  << " dichotic=" << format_double(r.result.release_dichotic)
                  << " bmld harmonic=" << format_double(r.result.bmld_harmonic)
                  << " mistuned=" << format_double(r.result.bmld_mistuned) << "  " << r.json.string() << '\n';
      }
    } else if (*cmd_c) {
      const CalibrationOutput out = cmd_calibrate(cal_flags.resolve());
      print_fit("sigma_m", out.monaural);
      for (const auto& [o, f] : out.binaural) print_fit("sigma_b " + std::string(to_string(o)), f);
      std::cout << out.path.string() << '\n';
    } else if (*cmd_r) {
      std::vector<fs::path> inputs(report_inputs.begin(), report_inputs.end());
      const Report r = cmd_report(inputs, report_out.empty() ? default_out_dir() : fs::path(report_out));
      std::cout << r.table_csv.string() << '\n' << r.plot_csv.string() << '\n';
    } else if (*cmd_v) {
      if (!snapshots.empty()) service_options.snapshot_dir = fs::path(snapshots);
      SessionManager manager(service_options);
      const int restored = manager.restore();
      httplib::Server server;
      register_routes(server, manager);
      std::cerr << "listening on http://" << host << ':' << port;
      if (restored) std::cerr << " (" << restored << " sessions resumed)";
      std::cerr << std::endl;
      if (!server.listen(host, port)) throw RuntimeError("cannot listen on " + host + ":" + std::to_string(port));
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
