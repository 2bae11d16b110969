// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#include "binharm/service.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include <httplib.h>

#include "binharm/app.hpp"
#include "binharm/errors.hpp"
#include "binharm/serialize.hpp"
#include "binharm/wav.hpp"

namespace binharm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::kAwaitingResponse: return "awaiting_response";
    case SessionStatus::kFinished: return "finished";
    case SessionStatus::kAborted: return "aborted";
  }
  return "?";
}

struct SessionManager::Session {
  std::string id;
  ConditionSpec spec;
  std::uint64_t seed = 0;
  StaircaseConfig cfg;
  StaircaseState state;
  SessionStatus status = SessionStatus::kAwaitingResponse;
  TrialStimulus current;
  std::vector<ResponseRecord> responses;
  std::vector<json> feedback;
  std::string abort_reason;
  mutable std::mutex m;

  int pending_trial() const { return state.trial_count + 1; }
};

namespace {

std::uint64_t random_u64() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string new_id() {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(random_u64()));
  return buf;
}

json staircase_json(const StaircaseConfig& c) {
  json sched = json::array();
  for (const auto& [r, s] : c.step_schedule) sched.push_back({r, s});
  return {{"start_level", c.start_level}, {"initial_step", c.initial_step}, {"step_schedule", sched},
          {"final_reversals", c.final_reversals}, {"min_level", c.min_level}, {"max_level", c.max_level}};
}

StaircaseConfig staircase_from_json(const json& j) {
  StaircaseConfig c;
  c.start_level = j.at("start_level").get<double>();
  c.initial_step = j.at("initial_step").get<double>();
  c.step_schedule.clear();
  for (const auto& e : j.at("step_schedule")) c.step_schedule.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
  c.final_reversals = j.at("final_reversals").get<int>();
  c.min_level = j.at("min_level").get<double>();
  c.max_level = j.at("max_level").get<double>();
  return c;
}

json optional_threshold(const StaircaseState& st, const StaircaseConfig& cfg, SessionStatus status) {
  return status == SessionStatus::kFinished ? json(st.threshold(cfg)) : json(nullptr);
}

json trial_descriptor(const std::string& id, int trial, int isi_ms) {
  json urls = json::array();
  for (int k = 1; k <= 3; ++k)
    urls.push_back("/sessions/" + id + "/trial/" + std::to_string(trial) + "/interval/" + std::to_string(k) +
                   ".wav");
  return {{"trial", trial}, {"intervals", urls}, {"isi_ms", isi_ms}, {"choices", {2, 3}}};
}

void prepare_trial(SessionManager::Session& s) {
  s.current = session_trial(s.spec, s.state.current_level, s.seed, s.pending_trial());
}

// Scores one choice and advances the track; returns the feedback payload.
json apply_response(SessionManager::Session& s, int choice, int isi_ms) {
  const int trial = s.pending_trial();
  const bool correct = choice - 2 == s.current.target_position;
  try {
    s.state = staircase_step(std::move(s.state), correct, s.cfg);
    if (s.state.terminated) s.status = SessionStatus::kFinished;
  } catch (const TrackAborted& e) {
    s.status = SessionStatus::kAborted;
    s.abort_reason = e.what();
    ++s.state.trial_count;
  }
  s.responses.push_back({trial, choice, correct});
  json next = nullptr;
  if (s.status == SessionStatus::kAwaitingResponse) {
    prepare_trial(s);
    next = trial_descriptor(s.id, s.pending_trial(), isi_ms);
  }
  json fb = {{"trial", trial},
             {"correct", correct},
             {"status", std::string(to_string(s.status))},
             {"reversals", s.state.reversals.size()},
             {"final_step_reversals", s.state.final_step_reversals(s.cfg)},
             {"next_trial", next},
             {"threshold", optional_threshold(s.state, s.cfg, s.status)}};
  s.feedback.push_back(fb);
  return fb;
}

}  // namespace

SessionManager::SessionManager(ServiceOptions options) : options_(std::move(options)) {
  if (options_.snapshot_dir) fs::create_directories(*options_.snapshot_dir);
}

json SessionManager::create(const ConditionSpec& spec, std::optional<std::uint64_t> seed,
                            const StaircaseConfig& staircase) {
  validate(spec);
  auto s = std::make_shared<Session>();
  s->spec = spec;
  s->seed = seed ? *seed : random_u64();
  s->cfg = staircase;
  s->state = start_staircase(staircase);
  {
    std::lock_guard lock(mutex_);
    do s->id = new_id();
    while (sessions_.contains(s->id));
    sessions_[s->id] = s;
  }
  std::lock_guard lock(s->m);
  prepare_trial(*s);
  snapshot(*s);
  return {{"id", s->id}, {"trial", trial_descriptor(s->id, s->pending_trial(), options_.isi_ms)}};
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("no session '" + id + "'");
  return it->second;
}

json SessionManager::describe(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->m);
  json responses = json::array();
  for (const auto& r : s->responses) responses.push_back({{"trial", r.trial}, {"choice", r.choice}, {"correct", r.correct}});
  const bool awaiting = s->status == SessionStatus::kAwaitingResponse;
  return {{"id", s->id},
          {"status", std::string(to_string(s->status))},
          {"condition", s->spec},
          {"trial", awaiting ? trial_descriptor(s->id, s->pending_trial(), options_.isi_ms) : json(nullptr)},
          {"trials_completed", s->responses.size()},
          {"reversals", s->state.reversals.size()},
          {"final_step_reversals", s->state.final_step_reversals(s->cfg)},
          {"final_reversals_needed", s->cfg.final_reversals},
          {"threshold", optional_threshold(s->state, s->cfg, s->status)},
          {"abort_reason", s->abort_reason.empty() ? json(nullptr) : json(s->abort_reason)},
          {"responses", responses}};
}

std::string SessionManager::audio(const std::string& id, int trial, int interval) const {
  auto s = find(id);
  if (interval < 1 || interval > 3) throw ValidationError("interval must be 1, 2 or 3");
  std::lock_guard lock(s->m);
  if (s->status != SessionStatus::kAwaitingResponse)
    throw StateError("session is " + std::string(to_string(s->status)));
  if (trial != s->pending_trial())
    throw StateError("trial " + std::to_string(trial) + " is not the pending trial " +
                     std::to_string(s->pending_trial()));
  const StereoSignal& sig =
      interval == 1 ? s->current.reference : s->current.comparisons[static_cast<std::size_t>(interval - 2)];
  return encode_wav(sig);
}

json SessionManager::respond(const std::string& id, int trial, int choice) {
  auto s = find(id);
  if (choice != 2 && choice != 3) throw ValidationError("choice must be interval 2 or 3");
  std::lock_guard lock(s->m);
  if (trial >= 1 && trial <= static_cast<int>(s->responses.size())) {
    const auto idx = static_cast<std::size_t>(trial - 1);
    if (s->responses[idx].choice != choice)
      throw StateError("trial " + std::to_string(trial) + " was already answered with interval " +
                       std::to_string(s->responses[idx].choice));
    return s->feedback[idx];
  }
  if (s->status != SessionStatus::kAwaitingResponse)
    throw StateError("session is " + std::string(to_string(s->status)));
  if (trial != s->pending_trial())
    throw StateError("trial " + std::to_string(trial) + " is not the pending trial " +
                     std::to_string(s->pending_trial()));
  json fb = apply_response(*s, choice, options_.isi_ms);
  snapshot(*s);
  return fb;
}

void SessionManager::snapshot(const Session& s) const {
  if (!options_.snapshot_dir) return;
  json choices = json::array();
  for (const auto& r : s.responses) choices.push_back(r.choice);
  const json doc = {{"id", s.id}, {"condition", s.spec}, {"seed", s.seed},
                    {"staircase", staircase_json(s.cfg)}, {"choices", choices}};
  const fs::path final_path = *options_.snapshot_dir / (s.id + ".json");
  const fs::path tmp = final_path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw RuntimeError("cannot write snapshot " + tmp.string());
    f << doc.dump(2) << '\n';
  }
  fs::rename(tmp, final_path);
}

int SessionManager::restore() {
  if (!options_.snapshot_dir) return 0;
  int n = 0;
  for (const auto& entry : fs::directory_iterator(*options_.snapshot_dir)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream f(entry.path());
    json doc;
    try {
      doc = json::parse(f);
      auto s = std::make_shared<Session>();
      s->id = doc.at("id").get<std::string>();
      s->spec = doc.at("condition").get<ConditionSpec>();
      validate(s->spec);
      s->seed = doc.at("seed").get<std::uint64_t>();
      s->cfg = staircase_from_json(doc.at("staircase"));
      s->state = start_staircase(s->cfg);
      prepare_trial(*s);
      for (const auto& c : doc.at("choices")) {
        if (s->status != SessionStatus::kAwaitingResponse) throw ValidationError("responses past end of track");
        apply_response(*s, c.get<int>(), options_.isi_ms);
      }
      std::lock_guard lock(mutex_);
      sessions_[s->id] = s;
      ++n;
    } catch (const json::exception& e) {
      throw ValidationError("malformed snapshot " + entry.path().string() + ": " + e.what());
    }
  }
  return n;
}

const std::string& SessionManager::noise_wav() const {
  std::call_once(noise_once_, [this] {
    Rng rng(options_.noise_seed);
    noise_wav_ = encode_wav(background_noise(options_.noise_seconds, rng));
  });
  return noise_wav_;
}

double SessionManager::peek_level(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->m);
  return s->state.current_level;
}

int SessionManager::peek_target_interval(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->m);
  return s->current.target_position + 2;
}

StaircaseState SessionManager::peek_state(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->m);
  return s->state;
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& msg) {
  send_json(res, status, {{"error", msg}});
}

template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const NotFound& e) {
    send_error(res, 404, e.what());
  } catch (const StateError& e) {
    send_error(res, 409, e.what());
  } catch (const ValidationError& e) {
    send_error(res, 422, e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, std::string("malformed request: ") + e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

json parse_body(const httplib::Request& req) {
  json body = json::parse(req.body);  // json::parse_error maps to 400
  if (!body.is_object()) throw json::type_error::create(302, "request body must be a JSON object", nullptr);
  return body;
}

ConditionSpec requested_condition(const json& body) {
  ConditionSpec spec;
  if (body.contains("experiment") || body.contains("kind")) {
    const auto preset = experiment_preset(parse_experiment(body.value("experiment", std::string("exp2"))));
    spec = preset.condition(parse_condition(body.value("kind", std::string("diotic-harmonic"))));
  }
  if (body.contains("condition")) {
    const json merged = [&] {
      json base = spec;
      base.update(body.at("condition"));
      return base;
    }();
    spec = merged.get<ConditionSpec>();
  }
  return spec;
}

}  // namespace

void register_routes(httplib::Server& server, SessionManager& manager) {
  server.Post("/sessions", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = req.body.empty() ? json::object() : parse_body(req);
      for (const auto& [key, v] : body.items())
        if (key != "experiment" && key != "kind" && key != "condition" && key != "seed")
          throw ValidationError("unknown key '" + key + "'");
      std::optional<std::uint64_t> seed;
      if (body.contains("seed")) seed = body.at("seed").get<std::uint64_t>();
      json out = manager.create(requested_condition(body), seed);
      res.set_header("Location", "/sessions/" + out.at("id").get<std::string>());
      send_json(res, 201, out);
    });
  });
  server.Get(R"(/sessions/([0-9a-f]+))", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, manager.describe(req.matches[1])); });
  });
  server.Get(R"(/sessions/([0-9a-f]+)/trial/(\d{1,9})/interval/(\d{1,9})\.wav)",
             [&](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 std::string wav = manager.audio(req.matches[1], std::stoi(req.matches[2]),
                                                 std::stoi(req.matches[3]));
                 res.set_header("Cache-Control", "no-store");
                 res.set_content(std::move(wav), "audio/wav");
               });
             });
  server.Post(R"(/sessions/([0-9a-f]+)/response)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      send_json(res, 200, manager.respond(req.matches[1], body.at("trial").get<int>(), body.at("choice").get<int>()));
    });
  });
  server.Get("/noise.wav", [&](const httplib::Request&, httplib::Response& res) {
    res.set_header("Cache-Control", "max-age=3600");
    res.set_content(manager.noise_wav(), "audio/wav");
  });
}

}  // namespace binharm
