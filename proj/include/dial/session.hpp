/* SPDX-License-Identifier: Apache-2.0 */

/** Session protocol shared by the CLI and the WebSocket service.
 *
 * Each client message is a JSON object with a "type" and yields exactly one
 * response plus zero or more pushes.  Every world event appended while
 * handling a message is pushed as {"type":"event"}; Audible events for the
 * session's own reader are additionally pushed as {"type":"buzzing"}.
 * Message shapes are published under docs/schema/. */

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dial/error.hpp"
#include "dial/world.hpp"
#include "json.hpp"

namespace dial {

inline constexpr int kSchemaVersion = 1;
inline constexpr double kRevealRadius = 0.5;

/// Client message types, in documentation order.
const std::vector<std::string>& client_message_types();
/// Server message types, in documentation order.
const std::vector<std::string>& server_message_types();

/// Checks a client message against the published shapes.  Throws
/// Error{UnknownType} or Error{BadRequest}.
void validate_client_message(const nlohmann::json& msg);

struct Reply {
  nlohmann::ordered_json response;
  std::vector<nlohmann::ordered_json> pushes;
};

nlohmann::ordered_json error_message(ErrorCode code, const std::string& detail);

/// Scenario document + seed + command list.  Replaying it reproduces the
/// recorded event log exactly.
struct Trace {
  nlohmann::json scenario;
  std::uint64_t seed = 0;
  std::vector<Command> commands;
};

nlohmann::ordered_json trace_to_json(const Trace& trace);
/// Throws Error{ParseError}.
Trace trace_from_json(const nlohmann::json& j);
/// Fresh world, every command applied in order; commands that failed when
/// recorded fail again identically and are skipped.
World replay(const Trace& trace);

class Session {
 public:
  explicit Session(std::string id);

  /// Never throws for protocol or domain errors; those become an `error`
  /// response.
  Reply handle(const nlohmann::json& msg);

  /// Auto-tick step of `dt`, if enabled and a world is loaded.
  std::optional<Reply> auto_tick(double dt);

  const std::string& id() const { return id_; }
  bool auto_tick_enabled() const { return auto_tick_; }
  const World* world() const { return world_ ? &*world_ : nullptr; }
  World* world() { return world_ ? &*world_ : nullptr; }
  std::optional<Trace> trace() const;

 private:
  nlohmann::ordered_json dispatch(const nlohmann::json& msg, std::size_t& log_mark);
  nlohmann::ordered_json world_state();
  nlohmann::ordered_json tag_list() const;
  void collect_pushes(std::size_t from, Reply& reply);
  void reveal_nearby();
  World& need_world();

  std::string id_;
  std::optional<World> world_;
  nlohmann::json scenario_doc_;
  std::set<TagId> revealed_;
  bool auto_tick_ = false;
};

/// Owns sessions; safe to call from many threads.  Messages for one
/// session are serialized; distinct sessions never share state.
class SessionManager {
 public:
  /// New session with a random opaque id.
  std::string create();
  bool exists(const std::string& id) const;

  /// Sends `msg` to session `id`; an unknown id yields a bad_session error.
  Reply handle(const std::string& id, const nlohmann::json& msg);
  std::optional<Reply> auto_tick(const std::string& id, double dt);
  std::optional<Trace> trace(const std::string& id) const;

 private:
  struct Slot {
    std::mutex mutex;
    Session session;
    explicit Slot(std::string id) : session(std::move(id)) {}
  };
  std::shared_ptr<Slot> find(const std::string& id) const;

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
};

}  // namespace dial
