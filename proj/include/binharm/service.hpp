// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Listening sessions: a human runs the same adaptive track the model runs,
// one trial at a time over HTTP. Payloads are described in docs/service-api.md.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "binharm/psychophysics.hpp"
#include "binharm/stimulus.hpp"

namespace httplib {
class Server;
}

namespace binharm {

enum class SessionStatus { kAwaitingResponse, kFinished, kAborted };
std::string_view to_string(SessionStatus s);  // "awaiting_response", ...

struct ServiceOptions {
  std::optional<std::filesystem::path> snapshot_dir;  // no persistence when empty
  int isi_ms = 300;
  double noise_seconds = 10.0;
  std::uint64_t noise_seed = 0x6e6f697365;
};

// HTTP-independent errors so the routes can map them to status codes.
class NotFound : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};
class StateError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

struct ResponseRecord {
  int trial;
  int choice;
  bool correct;
};

class SessionManager {
 public:
  explicit SessionManager(ServiceOptions options = {});

  // Returns {"id", "trial": descriptor}. A missing seed draws one at random.
  nlohmann::json create(const ConditionSpec& spec, std::optional<std::uint64_t> seed = std::nullopt,
                        const StaircaseConfig& staircase = {});
  nlohmann::json describe(const std::string& id) const;
  // WAV bytes of interval 1..3 of the pending trial.
  std::string audio(const std::string& id, int trial, int interval) const;
  // Scores `choice` (2 or 3) for `trial`. Repeating an already scored trial
  // returns its original feedback without advancing the track.
  nlohmann::json respond(const std::string& id, int trial, int choice);
  const std::string& noise_wav() const;

  // Restores every snapshot in the snapshot directory; returns how many.
  int restore();

  // Server-side inspection; never exposed over HTTP.
  double peek_level(const std::string& id) const;
  int peek_target_interval(const std::string& id) const;  // 2 or 3
  StaircaseState peek_state(const std::string& id) const;

  const ServiceOptions& options() const { return options_; }

  struct Session;  // opaque

 private:
  std::shared_ptr<Session> find(const std::string& id) const;
  void snapshot(const Session& s) const;

  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  mutable std::once_flag noise_once_;
  mutable std::string noise_wav_;
};

void register_routes(httplib::Server& server, SessionManager& manager);

}  // namespace binharm
