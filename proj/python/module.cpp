// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "binharm/app.hpp"
#include "binharm/errors.hpp"
#include "binharm/filters.hpp"
#include "binharm/serialize.hpp"
#include "binharm/wav.hpp"

namespace py = pybind11;
using namespace binharm;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const MonoSignal& s) {
  Array a(static_cast<py::ssize_t>(s.size()));
  std::copy(s.samples.begin(), s.samples.end(), a.mutable_data());
  return a;
}

Array to_array(const StereoSignal& s) {
  const auto n = static_cast<py::ssize_t>(s.size());
  Array a({py::ssize_t{2}, n});
  std::copy(s.left.samples.begin(), s.left.samples.end(), a.mutable_data(0, 0));
  std::copy(s.right.samples.begin(), s.right.samples.end(), a.mutable_data(1, 0));
  return a;
}

MonoSignal mono_from(const Array& a, double rate) {
  if (a.ndim() != 1) throw ValidationError("expected a 1-d array");
  return MonoSignal(std::vector<double>(a.data(), a.data() + a.shape(0)), rate);
}

StereoSignal stereo_from(const Array& a, double rate) {
  if (a.ndim() != 2 || a.shape(0) != 2) throw ValidationError("expected a (2, n) array");
  const auto n = a.shape(1);
  return StereoSignal(MonoSignal(std::vector<double>(a.data(0, 0), a.data(0, 0) + n), rate),
                      MonoSignal(std::vector<double>(a.data(1, 0), a.data(1, 0) + n), rate));
}

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

PathwayConfig pathway(const std::string& order, double sigma_m, double sigma_b) {
  PathwayConfig c;
  c.order = parse_pathway_order(order);
  c.sigma_m = sigma_m;
  c.sigma_b = sigma_b;
  validate(c);
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Single-channel auditory model of binaural masking release by harmonicity";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<RuntimeError>(m, "ModelError", PyExc_RuntimeError);

  py::class_<ConditionSpec>(m, "ConditionSpec")
      .def(py::init<>())
      .def(py::init([](const py::kwargs& kw) {
        nlohmann::json j = ConditionSpec{};
        j.update(nlohmann::json::parse(py::module_::import("json").attr("dumps")(kw).cast<std::string>()));
        return j.get<ConditionSpec>();
      }))
      .def_readwrite("f0", &ConditionSpec::f0)
      .def_readwrite("mistuning_percent", &ConditionSpec::mistuning_percent)
      .def_readwrite("n_components", &ConditionSpec::n_components)
      .def_readwrite("target_freq", &ConditionSpec::target_freq)
      .def_readwrite("target_ipd", &ConditionSpec::target_ipd)
      .def_readwrite("masker_level", &ConditionSpec::masker_level)
      .def_readwrite("level_reference_components", &ConditionSpec::level_reference_components)
      .def_readwrite("duration", &ConditionSpec::duration)
      .def_readwrite("ramp", &ConditionSpec::ramp)
      .def_readwrite("sample_rate", &ConditionSpec::sample_rate)
      .def_property_readonly("component_level", &ConditionSpec::component_level)
      .def("validate", [](const ConditionSpec& s) { validate(s); })
      .def("to_dict", [](const ConditionSpec& s) { return to_python(nlohmann::json(s)); })
      .def(py::self == py::self)
      .def("__repr__", [](const ConditionSpec& s) { return "ConditionSpec(" + nlohmann::json(s).dump() + ")"; });

  m.def("experiment_conditions", [](const std::string& exp) {
    const ExperimentPreset p = experiment_preset(parse_experiment(exp));
    py::dict out;
    for (ConditionKind k : kAllConditions) out[py::str(std::string(to_string(k)))] = p.condition(k);
    return out;
  }, py::arg("experiment"), "The four conditions of experiment '2' or '3', keyed by name.");

  m.def("level_to_amplitude", &level_to_amplitude, py::arg("level_db"));
  m.def("erb_hz", &erb_hz, py::arg("freq_hz"));
  m.def("component_frequencies", &component_frequencies, py::arg("spec"));

  m.def("synth", [](const ConditionSpec& spec, double level, std::uint64_t seed, int trial, int interval,
                    double isi, bool noise) {
    SynthRequest r{spec, level, seed, trial, interval, isi, noise};
    return to_array(synth_signal(r));
  }, py::arg("spec"), py::arg("level"), py::arg("seed") = 1, py::arg("trial") = 1, py::arg("interval") = 0,
     py::arg("isi") = 0.3, py::arg("background_noise") = false,
     "One interval (1..3) or the whole trial (0) as a (2, n) array; same samples as `binharm synth`.");

  m.def("trial", [](const ConditionSpec& spec, double level, std::uint64_t seed) {
    Rng rng(seed);
    const TrialStimulus t = assemble_trial(spec, level, rng);
    py::dict d;
    d["reference"] = to_array(t.reference);
    d["comparisons"] = py::make_tuple(to_array(t.comparisons[0]), to_array(t.comparisons[1]));
    d["target_position"] = t.target_position;
    return d;
  }, py::arg("spec"), py::arg("level"), py::arg("seed"));

  m.def("background_noise", [](double duration, std::uint64_t seed) {
    Rng rng(seed);
    return to_array(background_noise(duration, rng));
  }, py::arg("duration"), py::arg("seed"));

  m.def("butterworth_lowpass", [](const Array& x, double cutoff, int order, double fs) {
    return to_array(butterworth_lowpass(mono_from(x, fs), cutoff, order));
  }, py::arg("x"), py::arg("cutoff"), py::arg("order"), py::arg("sample_rate") = 48000.0);
  m.def("gammatone", [](const Array& x, double fc, double bw, double fs) {
    return to_array(gammatone_bandpass(mono_from(x, fs), fc, bw));
  }, py::arg("x"), py::arg("fc") = 800.0, py::arg("bandwidth") = erb_hz(800.0), py::arg("sample_rate") = 48000.0);

  m.def("peripheral", [](const Array& x) { return to_array(peripheral(stereo_from(x, 48000.0))); }, py::arg("x"),
        "Gammatone, half-wave rectification and 770 Hz lowpass per channel of a (2, n) array at 48 kHz.");
  m.def("monaural_pathway", [](const Array& internal, bool mistuned, double mod_harmonic, double mod_mistuned) {
    PathwayConfig c;
    c.mod_freq_harmonic = mod_harmonic;
    c.mod_freq_mistuned = mod_mistuned;
    return to_array(monaural_pathway(stereo_from(internal, 48000.0), mistuned, c));
  }, py::arg("internal"), py::arg("mistuned"), py::arg("mod_freq_harmonic") = 40.0, py::arg("mod_freq_mistuned") = 20.0);
  m.def("binaural_pathway", [](const Array& internal, bool mistuned, const std::string& order) {
    return to_array(binaural_pathway(stereo_from(internal, 48000.0), mistuned, pathway(order, 0.0, 0.0)));
  }, py::arg("internal"), py::arg("mistuned"), py::arg("order") = "binaural-then-mod");
  m.def("decision_energy", [](const Array& x, double sigma, std::uint64_t seed) {
    Rng rng(seed);
    return decision_energy(mono_from(x, 2000.0), sigma, rng);
  }, py::arg("x"), py::arg("sigma") = 0.0, py::arg("seed") = 0);

  m.def("run_track", [](const std::function<bool(double)>& respond) {
    const TrackResult r = run_track(respond);
    py::list levels, reversals;
    for (const auto& t : r.state.history) levels.append(t.level);
    for (const auto& v : r.state.reversals) reversals.append(v.level);
    py::dict d;
    d["threshold"] = r.threshold;
    d["levels"] = levels;
    d["reversals"] = reversals;
    return d;
  }, py::arg("respond"), "Runs one adaptive track; respond(level) returns whether the trial was correct.");

  m.def("model_threshold", [](const ConditionSpec& spec, const std::string& order, double sigma_m, double sigma_b,
                              int n_runs, std::uint64_t seed) {
    py::gil_scoped_release release;
    const ModelObserver obs(pathway(order, sigma_m, sigma_b));
    return run_condition(spec, obs, n_runs, seed).mean_threshold;
  }, py::arg("spec"), py::arg("order") = "binaural-then-mod", py::arg("sigma_m") = 0.01, py::arg("sigma_b") = 0.005,
     py::arg("n_runs") = 5, py::arg("seed") = 1);

  m.def("run_experiment", [](const std::string& exp, const std::string& order, double sigma_m, double sigma_b,
                             std::uint64_t seed, int samples, int runs, int jobs) {
    ExperimentOptions opt;
    opt.n_threshold_samples = samples;
    opt.runs_per_threshold = runs;
    opt.jobs = jobs;
    ExperimentResult r;
    {
      py::gil_scoped_release release;
      r = run_experiment(experiment_preset(parse_experiment(exp)), pathway(order, sigma_m, sigma_b), seed, opt);
    }
    py::dict d, means;
    for (const auto& c : r.conditions) means[py::str(std::string(to_string(c.kind)))] = c.mean;
    d["thresholds"] = means;
    d["release_diotic"] = r.release_diotic;
    d["release_dichotic"] = r.release_dichotic;
    d["bmld_harmonic"] = r.bmld_harmonic;
    d["bmld_mistuned"] = r.bmld_mistuned;
    return d;
  }, py::arg("experiment"), py::arg("order"), py::arg("sigma_m"), py::arg("sigma_b"), py::arg("seed") = 1,
     py::arg("samples") = 20, py::arg("runs") = 5, py::arg("jobs") = 1);

  m.def("encode_wav", [](const Array& x) { return py::bytes(encode_wav(stereo_from(x, 48000.0))); }, py::arg("x"));
  m.def("decode_wav", [](const py::bytes& b) { return to_array(decode_wav(std::string(b))); }, py::arg("data"));
  m.def("human_reference", [] { return to_python(human_reference_json()); });
}
