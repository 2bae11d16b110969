// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <thread>

#include <httplib.h>

#include "binharm/app.hpp"
#include "binharm/errors.hpp"
#include "binharm/serialize.hpp"
#include "binharm/service.hpp"
#include "binharm/wav.hpp"

using namespace binharm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Serves `manager` on an ephemeral local port for the lifetime of the object.
class TestServer {
 public:
  explicit TestServer(SessionManager& manager) {
    register_routes(server_, manager);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

json post(httplib::Client& c, const std::string& path, const json& body, int expected) {
  auto res = c.Post(path, body.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == expected);
  return json::parse(res->body);
}

// Answers correctly iff the level is at least `cutoff`, peeking at the server state.
int scripted_choice(const SessionManager& m, const std::string& id, double cutoff) {
  const int target = m.peek_target_interval(id);
  return m.peek_level(id) >= cutoff ? target : 5 - target;
}

}  // namespace

TEST_SUITE("service") {

TEST_CASE("session lifecycle in process") {
  SessionManager m;
  const json created = m.create(ConditionSpec{}, 17);
  const std::string id = created.at("id");
  const json& trial = created.at("trial");
  CHECK(trial.at("trial") == 1);
  CHECK(trial.at("intervals").size() == 3);
  CHECK(trial.at("isi_ms") == 300);
  CHECK(trial.dump().find("level") == std::string::npos);
  CHECK(trial.dump().find("target") == std::string::npos);

  const json state = m.describe(id);
  CHECK(state.at("status") == "awaiting_response");
  CHECK(state.dump().find("target_position") == std::string::npos);
  CHECK(state.dump().find("seed") == std::string::npos);

  CHECK_THROWS_AS(m.respond(id, 1, 1), ValidationError);
  CHECK_THROWS_AS(m.respond(id, 2, 2), StateError);
  CHECK_THROWS_AS(m.audio(id, 1, 4), ValidationError);
  CHECK_THROWS_AS(m.audio("nope", 1, 1), NotFound);

  // Two correct answers at step 5 lower the level by 5 dB.
  const double start = m.peek_level(id);
  m.respond(id, 1, m.peek_target_interval(id));
  const json fb = m.respond(id, 2, m.peek_target_interval(id));
  CHECK(fb.at("correct") == true);
  CHECK(fb.at("next_trial").at("trial") == 3);
  CHECK(m.peek_level(id) == start - 5.0);

  // Idempotent by trial index.
  const json answered = m.describe(id).at("responses").at(1);
  CHECK(m.respond(id, 2, answered.at("choice").get<int>()) == fb);
  CHECK(m.peek_level(id) == start - 5.0);
  CHECK_THROWS_AS(m.respond(id, 2, 5 - answered.at("choice").get<int>()), StateError);
  CHECK_THROWS_AS(m.audio(id, 2, 1), StateError);
  CHECK_NOTHROW(m.audio(id, 3, 1));
}

TEST_CASE("two sessions draw independent streams") {
  SessionManager m;
  const std::string a = m.create(ConditionSpec{}).at("id");
  const std::string b = m.create(ConditionSpec{}).at("id");
  CHECK(a != b);
  CHECK(m.audio(a, 1, 1) != m.audio(b, 1, 1));
  ConditionSpec bad;
  bad.n_components = 7;
  CHECK_THROWS_AS(m.create(bad), ValidationError);
}

TEST_CASE("interval 1 never holds the target") {
  SessionManager m;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::string id = m.create(ConditionSpec{}, seed).at("id");
    const int t = m.peek_target_interval(id);
    CHECK((t == 2 || t == 3));
  }
}

TEST_CASE("scripted HTTP client reproduces the in-process track") {
  SessionManager m;
  TestServer server(m);
  auto c = server.client();

  const json created = post(c, "/sessions", {{"experiment", "exp2"}, {"kind", "diotic-harmonic"}, {"seed", 5}}, 201);
  const std::string id = created.at("id");
  json trial = created.at("trial");
  json fb;
  std::vector<double> levels;
  int guard = 0;
  while (true) {
    REQUIRE(++guard < 500);
    levels.push_back(m.peek_level(id));
    const int n = trial.at("trial");
    for (const auto& url : trial.at("intervals")) {
      auto res = c.Get(url.get<std::string>());
      REQUIRE(res);
      REQUIRE(res->status == 200);
    }
    fb = post(c, "/sessions/" + id + "/response", {{"trial", n}, {"choice", scripted_choice(m, id, 43.0)}}, 200);
    if (fb.at("status") != "awaiting_response") break;
    trial = fb.at("next_trial");
  }
  const TrackResult oracle = run_track([](double level) { return level >= 43.0; });
  std::vector<double> oracle_levels;
  for (const auto& r : oracle.state.history) oracle_levels.push_back(r.level);
  CHECK(fb.at("status") == "finished");
  CHECK(fb.at("threshold").get<double>() == oracle.threshold);
  CHECK(levels == oracle_levels);
  CHECK(fb.at("final_step_reversals") == 8);

  auto state = c.Get("/sessions/" + id);
  REQUIRE(state);
  const json s = json::parse(state->body);
  CHECK(s.at("status") == "finished");
  CHECK(s.at("threshold").get<double>() == 42.5);
  CHECK(s.at("trial").is_null());

  auto late = c.Get("/sessions/" + id + "/trial/1/interval/1.wav");
  REQUIRE(late);
  CHECK(late->status == 409);
}

TEST_CASE("served audio is byte-identical to synth") {
  SessionManager m;
  TestServer server(m);
  auto c = server.client();
  ConditionSpec spec;
  spec.mistuning_percent = 2.64;
  spec.target_ipd = std::numbers::pi;
  const json created = post(c, "/sessions", {{"condition", spec}, {"seed", 1234}}, 201);
  const std::string id = created.at("id");

  for (int n = 1; n <= 3; ++n) {
    const double level = m.peek_level(id);
    for (int k = 1; k <= 3; ++k) {
      auto res = c.Get("/sessions/" + id + "/trial/" + std::to_string(n) + "/interval/" + std::to_string(k) + ".wav");
      REQUIRE(res);
      REQUIRE(res->status == 200);
      CHECK(res->get_header_value("Content-Type") == "audio/wav");
      SynthRequest req;
      req.spec = spec;
      req.level = level;
      req.seed = 1234;
      req.trial = n;
      req.interval = k;
      CHECK(res->body == encode_wav(synth_signal(req)));
    }
    post(c, "/sessions/" + id + "/response", {{"trial", n}, {"choice", m.peek_target_interval(id)}}, 200);
  }
}

TEST_CASE("HTTP error mapping") {
  SessionManager m;
  TestServer server(m);
  auto c = server.client();
  post(c, "/sessions", {{"condition", {{"n_components", 7}}}}, 422);
  post(c, "/sessions", {{"colour", 1}}, 422);
  auto bad = c.Post("/sessions", "{not json", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  auto missing = c.Get("/sessions/0123456789abcdef");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  const json created = post(c, "/sessions", json::object(), 201);
  const std::string id = created.at("id");
  post(c, "/sessions/" + id + "/response", {{"trial", 1}, {"choice", 1}}, 422);
  post(c, "/sessions/" + id + "/response", {{"trial", 4}, {"choice", 2}}, 409);
  post(c, "/sessions/" + id + "/response", {{"choice", 2}}, 400);
  auto wav = c.Get("/sessions/" + id + "/trial/1/interval/0.wav");
  REQUIRE(wav);
  CHECK(wav->status == 422);

  auto noise = c.Get("/noise.wav");
  REQUIRE(noise);
  CHECK(noise->status == 200);
  const StereoSignal n = decode_wav(noise->body);
  CHECK(n.size() == 480000);
  CHECK(rms_level(n.left.samples) == doctest::Approx(45.0).epsilon(0.01));
}

TEST_CASE("snapshots resume a session where it stopped") {
  const fs::path dir = fs::temp_directory_path() / "binharm_unit_snapshots";
  fs::remove_all(dir);
  ServiceOptions opt;
  opt.snapshot_dir = dir;
  std::string id;
  json last;
  std::string pending_audio;
  {
    SessionManager m(opt);
    id = m.create(ConditionSpec{}, 3).at("id");
    for (int n = 1; n <= 9; ++n) last = m.respond(id, n, scripted_choice(m, id, 50.0));
    pending_audio = m.audio(id, 10, 2);
  }
  SessionManager resumed(opt);
  CHECK(resumed.restore() == 1);
  const json state = resumed.describe(id);
  CHECK(state.at("trials_completed") == 9);
  CHECK(state.at("trial").at("trial") == 10);
  CHECK(resumed.audio(id, 10, 2) == pending_audio);
  CHECK(resumed.respond(id, 9, state.at("responses").at(8).at("choice").get<int>()) == last);
  fs::remove_all(dir);
}

}
