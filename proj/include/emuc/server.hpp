#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "emuc/diagnostic.hpp"
#include "emuc/interpreter.hpp"
#include "json.hpp"

namespace httplib {
class Server;
}

namespace emuc {

class SessionNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownTrigger : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelRejected : public std::runtime_error {
 public:
  explicit ModelRejected(std::vector<Diagnostic> diags)
      : std::runtime_error("model rejected"), diagnostics(std::move(diags)) {}
  std::vector<Diagnostic> diagnostics;
};

/// A step that trapped; the session state is left as it was.
class StepTrapped : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json diagnostics_to_json(const std::vector<Diagnostic>& diags);

/// In-memory interpreter sessions. Safe to call from several threads; the
/// operations on one session are serialized.
class SessionStore {
 public:
  using Clock = std::chrono::steady_clock;

  explicit SessionStore(std::chrono::seconds idle_timeout = std::chrono::minutes(30));

  /// Parses and checks `model_text`; throws ModelRejected on errors.
  nlohmann::json create(std::string_view model_text);
  /// Snapshot including the history.
  nlohmann::json get(const std::string& id);
  nlohmann::json fire(const std::string& id, const std::string& trigger);
  nlohmann::json reset(const std::string& id);
  void remove(const std::string& id);
  /// Re-runs the history from init and compares with the live state.
  nlohmann::json replay(const std::string& id);

  /// Drops sessions untouched for longer than the idle timeout.
  std::size_t evict_idle(Clock::time_point now = Clock::now());
  std::size_t size() const;

 private:
  struct Step {
    std::string trigger;
    MachineState state;
    bool idled = false;
  };
  struct Session {
    std::string id;
    std::unique_ptr<Diagram> diagram;
    std::unique_ptr<Interpreter> interp;
    MachineState state;
    bool idled = false;
    std::vector<Step> history;
    Clock::time_point touched;
    std::mutex mu;
  };

  std::shared_ptr<Session> find(const std::string& id);
  std::string new_id();
  static nlohmann::json snapshot(const Session& s, bool with_history);

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::chrono::seconds idle_timeout_;
  std::uint64_t counter_ = 0;
  std::uint64_t salt_;
};

struct ServerOptions {
  /// Model text offered at GET /api/model and used when a create request
  /// carries no model.
  std::optional<std::string> default_model;
  std::optional<std::filesystem::path> static_dir;
};

/// Installs the /api routes (and the static mount, if any) on `svr`.
void install_routes(httplib::Server& svr, SessionStore& store, const ServerOptions& opts);

}  // namespace emuc
