#include "emuc/server.hpp"

#include <iomanip>
#include <random>
#include <sstream>

#include "emuc/analyzer.hpp"
#include "emuc/trace.hpp"
#include "httplib.h"

namespace emuc {
namespace {

using nlohmann::json;

json state_to_json(const Diagram& d, const MachineState& s) {
  json vars = json::array();
  for (const auto& v : d.variables) {
    vars.push_back({{"name", v.name}, {"type", type_name(v.type)}, {"value", format_value(s.valuation.at(v.name))}});
  }
  return {{"curr", s.curr}, {"prev", s.prev}, {"variables", vars}, {"trace", format_state(d, s)}};
}

json error_body(const std::string& message) { return {{"error", message}}; }

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

json diagnostics_to_json(const std::vector<Diagnostic>& diags) {
  json out = json::array();
  for (const auto& d : diags) {
    out.push_back({{"severity", d.severity == Severity::error ? "error" : "warning"},
                   {"message", d.message},
                   {"line", d.begin.line},
                   {"column", d.begin.column},
                   {"end_line", d.end.line},
                   {"end_column", d.end.column}});
  }
  return out;
}

SessionStore::SessionStore(std::chrono::seconds idle_timeout) : idle_timeout_(idle_timeout) {
  std::random_device rd;
  salt_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string SessionStore::new_id() {
  std::mt19937_64 mix(salt_ + ++counter_);
  std::ostringstream o;
  o << std::hex << std::setfill('0') << std::setw(16) << mix();
  return o.str();
}

json SessionStore::snapshot(const Session& s, bool with_history) {
  const Diagram& d = *s.diagram;
  json triggers = json::array();
  for (const auto& t : s.interp->triggers()) {
    triggers.push_back({{"name", t}, {"permitted", s.interp->permitted(s.state, t)}});
  }
  json j = {
      {"session", s.id},
      {"model", d.name},
      {"nodes", d.nodes},
      {"state", state_to_json(d, s.state)},
      {"triggers", triggers},
      {"idled", s.idled},
      {"step", s.history.size()},
  };
  if (with_history) {
    json h = json::array();
    for (const auto& st : s.history) {
      h.push_back({{"trigger", st.trigger}, {"idled", st.idled}, {"state", state_to_json(d, st.state)}});
    }
    j["history"] = h;
  }
  return j;
}

std::shared_ptr<SessionStore::Session> SessionStore::find(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound("no session '" + id + "'");
  return it->second;
}

json SessionStore::create(std::string_view model_text) {
  auto loaded = load_model(model_text);
  if (!loaded.ok()) throw ModelRejected(std::move(loaded.diagnostics));
  auto s = std::make_shared<Session>();
  s->diagram = std::make_unique<Diagram>(std::move(*loaded.value));
  s->interp = std::make_unique<Interpreter>(*s->diagram);
  s->state = s->interp->init();
  s->touched = Clock::now();
  evict_idle(s->touched);
  {
    std::lock_guard lock(mu_);
    s->id = new_id();
    sessions_[s->id] = s;
  }
  std::lock_guard slock(s->mu);
  return snapshot(*s, false);
}

json SessionStore::get(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  s->touched = Clock::now();
  return snapshot(*s, true);
}

json SessionStore::fire(const std::string& id, const std::string& trigger) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  s->touched = Clock::now();
  if (!s->interp->knows_trigger(trigger)) {
    throw UnknownTrigger("model '" + s->diagram->name + "' has no trigger '" + trigger + "'");
  }
  MachineState next;
  try {
    next = s->interp->step(s->state, trigger);
  } catch (const TrapError& e) {
    throw StepTrapped(e.what());
  }
  s->idled = next == s->state;
  s->state = std::move(next);
  s->history.push_back({trigger, s->state, s->idled});
  return snapshot(*s, false);
}

json SessionStore::reset(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  s->touched = Clock::now();
  s->state = s->interp->init();
  s->idled = false;
  s->history.clear();
  return snapshot(*s, false);
}

void SessionStore::remove(const std::string& id) {
  std::lock_guard lock(mu_);
  if (sessions_.erase(id) == 0) throw SessionNotFound("no session '" + id + "'");
}

json SessionStore::replay(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  MachineState q = s->interp->init();
  for (const auto& st : s->history) q = s->interp->step(q, st.trigger);
  return {{"session", id},
          {"consistent", q == s->state},
          {"replayed", state_to_json(*s->diagram, q)},
          {"live", state_to_json(*s->diagram, s->state)}};
}

std::size_t SessionStore::evict_idle(Clock::time_point now) {
  std::lock_guard lock(mu_);
  std::size_t dropped = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    bool stale = false;
    {
      std::lock_guard slock(it->second->mu);
      stale = now - it->second->touched > idle_timeout_;
    }
    if (stale) {
      it = sessions_.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

void install_routes(httplib::Server& svr, SessionStore& store, const ServerOptions& opts) {
  // Maps store exceptions to status codes.
  auto guarded = [](auto body) {
    return [body](const httplib::Request& req, httplib::Response& res) {
      try {
        body(req, res);
      } catch (const ModelRejected& e) {
        reply(res, 422, {{"error", e.what()}, {"diagnostics", diagnostics_to_json(e.diagnostics)}});
      } catch (const SessionNotFound& e) {
        reply(res, 404, error_body(e.what()));
      } catch (const UnknownTrigger& e) {
        reply(res, 400, error_body(e.what()));
      } catch (const StepTrapped& e) {
        reply(res, 409, error_body(e.what()));
      } catch (const json::exception& e) {
        reply(res, 400, error_body(std::string("malformed request: ") + e.what()));
      }
    };
  };

  svr.Get("/api/model", guarded([opts](const httplib::Request&, httplib::Response& res) {
    if (!opts.default_model) {
      reply(res, 404, error_body("no model configured"));
      return;
    }
    reply(res, 200, {{"model", *opts.default_model}});
  }));

  svr.Post("/api/sessions", guarded([&store, opts](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> text;
    if (!req.body.empty()) {
      auto body = json::parse(req.body);
      if (body.contains("model")) text = body.at("model").get<std::string>();
    }
    if (!text) text = opts.default_model;
    if (!text) {
      reply(res, 400, error_body("request carries no model and no default is configured"));
      return;
    }
    reply(res, 201, store.create(*text));
  }));

  svr.Get(R"(/api/sessions/([^/]+))", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, store.get(req.matches[1]));
  }));

  svr.Delete(R"(/api/sessions/([^/]+))", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    store.remove(req.matches[1]);
    res.status = 204;
  }));

  svr.Post(R"(/api/sessions/([^/]+)/fire)",
           guarded([&store](const httplib::Request& req, httplib::Response& res) {
             auto body = json::parse(req.body);
             reply(res, 200, store.fire(req.matches[1], body.at("trigger").get<std::string>()));
           }));

  svr.Post(R"(/api/sessions/([^/]+)/reset)",
           guarded([&store](const httplib::Request& req, httplib::Response& res) {
             reply(res, 200, store.reset(req.matches[1]));
           }));

  svr.Get(R"(/api/sessions/([^/]+)/replay)",
          guarded([&store](const httplib::Request& req, httplib::Response& res) {
            reply(res, 200, store.replay(req.matches[1]));
          }));

  if (opts.static_dir) svr.set_mount_point("/", opts.static_dir->string());
}

}  // namespace emuc
