// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#include "binharm/app.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include "binharm/errors.hpp"
#include "binharm/serialize.hpp"
#include "binharm/wav.hpp"

namespace binharm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw RuntimeError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw RuntimeError("write failed: " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw RuntimeError("cannot open " + path.string());
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

double ipd_degrees(const ConditionSpec& s) { return s.target_ipd * 180.0 / std::numbers::pi; }

std::string result_stem(ExperimentId e, PathwayOrder o) {
  return std::string(to_string(e)) + "_" + std::string(to_string(o));
}

}  // namespace

PathwayConfig RunConfig::pathway(PathwayOrder order) const {
  if (!sigma_m) throw ValidationError("sigma_m is not set (pass --sigma-m, --sigmas FILE or --fit)");
  auto it = sigma_b.find(order);
  if (it == sigma_b.end())
    throw ValidationError("sigma_b for " + std::string(to_string(order)) +
                          " is not set (pass --sigma-b, --sigmas FILE or --fit)");
  PathwayConfig p;
  p.order = order;
  p.sigma_m = *sigma_m;
  p.sigma_b = it->second;
  p.mod_freq_harmonic = mod_freq_harmonic;
  p.mod_freq_mistuned = mod_freq_mistuned;
  validate(p);
  return p;
}

json to_json(const RunConfig& c) {
  json exps = json::array(), orders = json::array(), sb = json::object();
  for (auto e : c.experiments) exps.push_back(std::string(to_string(e)));
  for (auto o : c.orders) orders.push_back(std::string(to_string(o)));
  for (const auto& [o, v] : c.sigma_b) sb[std::string(to_string(o))] = v;
  json j = {{"experiments", exps},
            {"orders", orders},
            {"sigma_m", c.sigma_m ? json(*c.sigma_m) : json(nullptr)},
            {"sigma_b", sb},
            {"seed", c.seed},
            {"threshold_samples", c.threshold_samples},
            {"runs_per_threshold", c.runs_per_threshold},
            {"background_noise", c.background_noise},
            {"dump_internals", c.dump_internals},
            {"anchors", c.anchors},
            {"calibration_tracks", c.calibration_tracks},
            {"mod_freq_harmonic", c.mod_freq_harmonic},
            {"mod_freq_mistuned", c.mod_freq_mistuned}};
  return j;
}

void merge_json(const json& j, RunConfig& c) {
  if (!j.is_object()) throw ValidationError("run config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "experiments") {
        c.experiments.clear();
        for (const auto& e : v) c.experiments.push_back(parse_experiment(e.get<std::string>()));
      } else if (key == "orders") {
        c.orders.clear();
        for (const auto& o : v) c.orders.push_back(parse_pathway_order(o.get<std::string>()));
      } else if (key == "sigma_m") {
        if (v.is_null()) c.sigma_m.reset();
        else c.sigma_m = v.get<double>();
      } else if (key == "sigma_b") {
        for (const auto& [o, s] : v.items()) c.sigma_b[parse_pathway_order(o)] = s.get<double>();
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "threshold_samples") {
        c.threshold_samples = v.get<int>();
      } else if (key == "runs_per_threshold") {
        c.runs_per_threshold = v.get<int>();
      } else if (key == "background_noise") {
        c.background_noise = v.get<bool>();
      } else if (key == "dump_internals") {
        c.dump_internals = v.get<bool>();
      } else if (key == "anchors") {
        c.anchors = v.get<CalibrationAnchors>();
      } else if (key == "calibration_tracks") {
        c.calibration_tracks = v.get<int>();
      } else if (key == "mod_freq_harmonic") {
        c.mod_freq_harmonic = v.get<double>();
      } else if (key == "mod_freq_mistuned") {
        c.mod_freq_mistuned = v.get<double>();
      } else if (key == "output_dir") {
        c.output_dir = v.get<std::string>();
      } else if (key == "jobs") {
        c.jobs = v.get<int>();
      } else {
        throw ValidationError("unknown run config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad run config: ") + e.what());
  }
  if (c.threshold_samples < 1 || c.runs_per_threshold < 1 || c.calibration_tracks < 1)
    throw ValidationError("sample, run and track counts must be >= 1");
}

RunConfig load_run_config(const fs::path& path) {
  RunConfig c;
  merge_json(read_json(path), c);
  return c;
}

void apply_sigma_file(const fs::path& path, RunConfig& cfg) {
  const json j = read_json(path);
  try {
    cfg.sigma_m = j.at("monaural").at("sigma").get<double>();
    for (const auto& [o, fit] : j.at("binaural").items())
      cfg.sigma_b[parse_pathway_order(o)] = fit.at("sigma").get<double>();
  } catch (const json::exception& e) {
    throw ValidationError("malformed sigma file " + path.string() + ": " + e.what());
  }
}

TrialStimulus session_trial(const ConditionSpec& spec, double level, std::uint64_t seed, int trial,
                            const TrialOptions& options) {
  if (trial < 1) throw ValidationError("trial numbers start at 1");
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(trial)}));
  return assemble_trial(spec, level, rng, options);
}

StereoSignal synth_signal(const SynthRequest& req) {
  if (req.interval < 0 || req.interval > 3) throw ValidationError("interval must be 0 (all) or 1..3");
  const TrialStimulus t =
      session_trial(req.spec, req.level, req.seed, req.trial, TrialOptions{req.background_noise});
  if (req.interval == 1) return t.reference;
  if (req.interval > 1) return t.comparisons[static_cast<std::size_t>(req.interval - 2)];
  const auto gap = static_cast<std::size_t>(std::llround(req.isi * req.spec.sample_rate));
  const std::size_t n = t.reference.size();
  StereoSignal all(3 * n + 2 * gap, req.spec.sample_rate);
  const StereoSignal* parts[3] = {&t.reference, &t.comparisons[0], &t.comparisons[1]};
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t off = k * (n + gap);
    std::copy(parts[k]->left.samples.begin(), parts[k]->left.samples.end(), all.left.samples.begin() + off);
    std::copy(parts[k]->right.samples.begin(), parts[k]->right.samples.end(), all.right.samples.begin() + off);
  }
  return all;
}

void cmd_synth(const SynthRequest& req, const fs::path& out_path) {
  const StereoSignal s = synth_signal(req);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  write_wav(out_path, s);
}

namespace {

json result_json(const RunConfig& narrowed, const ExperimentPreset& preset, const ExperimentResult& r) {
  json conds = json::array();
  for (std::size_t k = 0; k < 4; ++k) {
    const ConditionSummary& c = r.conditions[k];
    json samples = json::array();
    for (const auto& s : c.samples) samples.push_back(s.mean_threshold);
    conds.push_back({{"name", std::string(to_string(c.kind))},
                     {"spec", preset.conditions[k]},
                     {"mean_threshold", c.mean},
                     {"relative_threshold", c.mean - preset.conditions[k].masker_level},
                     {"std", c.std},
                     {"samples", samples}});
  }
  return {{"run_config", to_json(narrowed)},
          {"experiment", std::string(to_string(r.experiment))},
          {"pathway", r.pathway},
          {"conditions", conds},
          {"release",
           {{"diotic", r.release_diotic},
            {"dichotic", r.release_dichotic},
            {"diotic_std", std_of(r.release_diotic_samples)},
            {"dichotic_std", std_of(r.release_dichotic_samples)}}},
          {"bmld", {{"harmonic", r.bmld_harmonic}, {"mistuned", r.bmld_mistuned}}},
          {"human_reference", human_reference_json()}};
}

std::string result_csv(const RunConfig& narrowed, const ExperimentResult& r, PathwayOrder order) {
  std::ostringstream out;
  out << "# run_config: " << to_json(narrowed).dump() << '\n';
  out << "experiment,config,ipd,mistuning,sample,threshold_db\n";
  for (const ConditionSummary& c : r.conditions) {
    for (std::size_t i = 0; i < c.samples.size(); ++i) {
      const ConditionSpec& s = c.samples[i].condition;
      out << to_string(r.experiment) << ',' << to_string(order) << ',' << format_double(ipd_degrees(s))
          << ',' << format_double(s.mistuning_percent) << ',' << i << ','
          << format_double(c.samples[i].mean_threshold) << '\n';
    }
  }
  return out.str();
}

}  // namespace

std::vector<SimulationOutput> cmd_simulate(const RunConfig& cfg) {
  std::vector<SimulationOutput> outputs;
  for (ExperimentId e : cfg.experiments) {
    const ExperimentPreset preset = experiment_preset(e);
    for (PathwayOrder o : cfg.orders) {
      const PathwayConfig pathway = cfg.pathway(o);
      RunConfig narrowed = cfg;
      narrowed.experiments = {e};
      narrowed.orders = {o};
      narrowed.sigma_b = {{o, pathway.sigma_b}};

      ExperimentOptions opt;
      opt.n_threshold_samples = cfg.threshold_samples;
      opt.runs_per_threshold = cfg.runs_per_threshold;
      opt.background_noise = cfg.background_noise;
      opt.jobs = cfg.jobs;
      SimulationOutput out{e, o, {}, {}, run_experiment(preset, pathway, cfg.seed, opt)};

      const std::string stem = result_stem(e, o);
      out.csv = cfg.output_dir / (stem + ".csv");
      out.json = cfg.output_dir / (stem + ".json");
      write_text(out.csv, result_csv(narrowed, out.result, o));
      write_text(out.json, result_json(narrowed, preset, out.result).dump(2) + "\n");
      if (cfg.dump_internals) {
        const double level = preset.conditions[0].masker_level + cfg.anchors.diotic_harmonic_relative;
        dump_internals(preset, pathway, level, cfg.seed, cfg.output_dir / "internals");
      }
      outputs.push_back(std::move(out));
    }
  }
  return outputs;
}

CalibrationOutput cmd_calibrate(const RunConfig& cfg) {
  const ExperimentPreset preset = experiment_preset(ExperimentId::kExp2);
  SigmaFitOptions opt;
  opt.n_tracks = cfg.calibration_tracks;
  opt.jobs = cfg.jobs;
  PathwayConfig base;
  base.mod_freq_harmonic = cfg.mod_freq_harmonic;
  base.mod_freq_mistuned = cfg.mod_freq_mistuned;

  CalibrationOutput out;
  const ConditionSpec& diotic = preset.condition(ConditionKind::kDioticHarmonic);
  out.monaural = fit_sigma(diotic, base, NoiseTarget::kMonaural,
                           diotic.masker_level + cfg.anchors.diotic_harmonic_relative,
                           derive_seed(cfg.seed, {0x6d6f6e}), opt);
  const ConditionSpec& dichotic = preset.condition(ConditionKind::kDichoticHarmonic);
  for (PathwayOrder o : cfg.orders) {
    PathwayConfig p = base;
    p.order = o;
    out.binaural[o] = fit_sigma(dichotic, p, NoiseTarget::kBinaural,
                                dichotic.masker_level + cfg.anchors.dichotic_harmonic_relative,
                                derive_seed(cfg.seed, {0x62696e, static_cast<std::uint64_t>(o)}), opt);
  }

  json bin = json::object();
  for (const auto& [o, f] : out.binaural) bin[std::string(to_string(o))] = f;
  RunConfig recorded = cfg;
  recorded.experiments = {ExperimentId::kExp2};
  const json doc = {{"run_config", to_json(recorded)},
                    {"monaural_condition", diotic},
                    {"binaural_condition", dichotic},
                    {"monaural", out.monaural},
                    {"binaural", bin}};
  out.path = cfg.output_dir / "sigma_fits.json";
  write_text(out.path, doc.dump(2) + "\n");
  return out;
}

Report cmd_report(const std::vector<fs::path>& results, const fs::path& out_dir) {
  if (results.empty()) throw ValidationError("report needs at least one results file");
  struct Entry {
    ExperimentId exp;
    PathwayOrder order;
    json doc;
  };
  std::vector<Entry> entries;
  for (const auto& p : results) {
    json j = read_json(p);
    try {
      entries.push_back({parse_experiment(j.at("experiment").get<std::string>()),
                         parse_pathway_order(j.at("pathway").at("order").get<std::string>()), j});
      if (j.at("conditions").size() != 4) throw ValidationError("expected 4 conditions");
    } catch (const json::exception& e) {
      throw ValidationError("malformed results file " + p.string() + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("malformed results file " + p.string() + ": " + e.what());
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::pair(static_cast<int>(a.exp), static_cast<int>(a.order)) <
           std::pair(static_cast<int>(b.exp), static_cast<int>(b.order));
  });

  const HumanReference& h = kHumanReference;
  Report report;
  std::ostringstream plot;
  plot << "experiment,config,ipd,model_release_mean,model_release_std,human_release\n";
  auto opt_str = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const Entry& e : entries) try {
    const std::string exp(to_string(e.exp)), cfg(to_string(e.order));
    const json& j = e.doc;
    for (const auto& c : j.at("conditions"))
      report.rows.push_back({exp, cfg, "condition", c.at("name").get<std::string>(),
                             c.at("mean_threshold").get<double>(), c.at("std").get<double>(), std::nullopt});
    const bool exp2 = e.exp == ExperimentId::kExp2;
    const std::optional<double> human_rel_diotic =
        exp2 ? h.exp2.mistuning_release_diotic : h.exp3.mistuning_release_diotic;
    const std::optional<double> human_rel_dichotic =
        exp2 ? std::nullopt : std::optional<double>(h.exp3.mistuning_release_dichotic);
    const json& rel = j.at("release");
    report.rows.push_back({exp, cfg, "release", "diotic", rel.at("diotic").get<double>(),
                           rel.at("diotic_std").get<double>(), human_rel_diotic});
    report.rows.push_back({exp, cfg, "release", "dichotic", rel.at("dichotic").get<double>(),
                           rel.at("dichotic_std").get<double>(), human_rel_dichotic});
    const json& b = j.at("bmld");
    const json& conds = j.at("conditions");
    auto paired_std = [&](std::size_t a, std::size_t c) {
      const auto x = conds.at(a).at("samples").get<std::vector<double>>();
      const auto y = conds.at(c).at("samples").get<std::vector<double>>();
      if (x.size() != y.size()) throw ValidationError("condition sample counts differ");
      std::vector<double> d(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
      return std_of(d);
    };
    report.rows.push_back({exp, cfg, "bmld", "harmonic", b.at("harmonic").get<double>(), paired_std(0, 2),
                           exp2 ? h.exp2.bmld_harmonic : h.exp3.bmld_harmonic});
    report.rows.push_back({exp, cfg, "bmld", "mistuned", b.at("mistuned").get<double>(), paired_std(1, 3),
                           exp2 ? h.exp2.bmld_mistuned : h.exp3.bmld_mistuned});

    plot << exp << ',' << cfg << ",diotic," << format_double(rel.at("diotic").get<double>()) << ','
         << format_double(rel.at("diotic_std").get<double>()) << ',' << opt_str(human_rel_diotic) << '\n';
    plot << exp << ',' << cfg << ",dichotic," << format_double(rel.at("dichotic").get<double>()) << ','
         << format_double(rel.at("dichotic_std").get<double>()) << ',' << opt_str(human_rel_dichotic)
         << '\n';
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("malformed results: ") + ex.what());
  }

  std::ostringstream table;
  table << "experiment,config,kind,name,model_mean,model_std,human\n";
  for (const ReportRow& r : report.rows)
    table << r.experiment << ',' << r.config << ',' << r.kind << ',' << r.name << ','
          << format_double(r.model_mean) << ',' << format_double(r.model_std) << ',' << opt_str(r.human)
          << '\n';
  report.table_csv = out_dir / "report_table.csv";
  report.plot_csv = out_dir / "release_plot_data.csv";
  write_text(report.table_csv, table.str());
  write_text(report.plot_csv, plot.str());
  return report;
}

std::vector<fs::path> dump_internals(const ExperimentPreset& preset, const PathwayConfig& pathway,
                                     double level, std::uint64_t seed, const fs::path& dir) {
  std::vector<fs::path> written;
  const Periphery periphery;
  auto dump = [&](const std::string& name, const MonoSignal& s) {
    std::ostringstream out;
    out << "time,value\n";
    for (std::size_t i = 0; i < s.size(); ++i)
      out << format_double(static_cast<double>(i) / s.sample_rate) << ',' << format_double(s.samples[i]) << '\n';
    const fs::path p = dir / (name + ".csv");
    write_text(p, out.str());
    written.push_back(p);
  };
  for (std::size_t k = 0; k < 4; ++k) {
    const ConditionSpec& spec = preset.conditions[k];
    Rng rng(derive_seed(seed, {0x64756d70, k}));
    const TrialStimulus trial = assemble_trial(spec, level, rng);
    const StereoSignal& interval = trial.comparisons[static_cast<std::size_t>(trial.target_position)];
    const std::string stem = std::string(to_string(preset.id)) + "_" + std::string(to_string(pathway.order)) +
                             "_" + std::string(to_string(kAllConditions[k]));
    const StereoSignal internal = periphery.process(interval);
    dump(stem + "_stimulus_left", interval.left);
    dump(stem + "_stimulus_right", interval.right);
    dump(stem + "_peripheral_left", internal.left);
    dump(stem + "_peripheral_right", internal.right);
    dump(stem + "_pathway", spec.is_dichotic() ? binaural_pathway(internal, spec.is_mistuned(), pathway)
                                               : monaural_pathway(internal, spec.is_mistuned(), pathway));
  }
  return written;
}

}  // namespace binharm
