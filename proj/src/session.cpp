/* SPDX-License-Identifier: Apache-2.0 */

#include "dial/session.hpp"

#include <algorithm>
#include <random>

#include "dial/error.hpp"

namespace dial {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

enum class Kind { String, Number, Bool, Object, Unsigned };

struct FieldSpec {
  const char* name;
  Kind kind;
  bool required;
};

struct MessageSpec {
  const char* type;
  std::vector<FieldSpec> fields;
};

const std::vector<MessageSpec>& client_specs() {
  static const std::vector<MessageSpec> specs = {
      {"hello", {{"session", Kind::String, false}}},
      {"load_scenario",
       {{"name", Kind::String, false}, {"scenario", Kind::Object, false},
        {"seed", Kind::Unsigned, false}}},
      {"move", {{"dx", Kind::Number, true}, {"dy", Kind::Number, true}}},
      {"step", {{"dt", Kind::Number, true}}},
      {"auto_tick", {{"enabled", Kind::Bool, true}}},
      {"list_tags", {}},
      {"buzz", {{"tag_id", Kind::String, true}, {"password", Kind::String, false}}},
      {"radar", {{"tag_id", Kind::String, true}}},
      {"nfc_read", {}},
      {"save_inventory", {{"path", Kind::String, true}}},
      {"get_trace", {}},
  };
  return specs;
}

bool has_kind(const json& v, Kind k) {
  switch (k) {
    case Kind::String: return v.is_string();
    case Kind::Number: return v.is_number();
    case Kind::Bool: return v.is_boolean();
    case Kind::Object: return v.is_object();
    case Kind::Unsigned: return v.is_number_unsigned();
  }
  return false;
}

[[noreturn]] void bad_request(const std::string& what) { throw Error(ErrorCode::BadRequest, what); }

TagId tag_arg(const json& msg) {
  const auto id = TagId::from_hex(msg["tag_id"].get<std::string>());
  if (!id) bad_request("tag_id must be 12 hex digits");
  return *id;
}

ordered_json event_json(const Event& e) {
  ordered_json j;
  j["t"] = e.t;
  j["kind"] = e.kind;
  for (const auto& [key, value] : e.fields.items()) j[key] = value;
  return j;
}

ordered_json typed(const char* type) {
  ordered_json j;
  j["type"] = type;
  return j;
}

}  // namespace

const std::vector<std::string>& client_message_types() {
  static const std::vector<std::string> types = [] {
    std::vector<std::string> t;
    for (const auto& s : client_specs()) t.emplace_back(s.type);
    return t;
  }();
  return types;
}

const std::vector<std::string>& server_message_types() {
  static const std::vector<std::string> types = {
      "world_state", "tag_list", "distance", "buzzing", "ndef_result",
      "inventory_saved", "trace", "event", "error"};
  return types;
}

void validate_client_message(const json& msg) {
  if (!msg.is_object()) bad_request("message must be a JSON object");
  if (!msg.contains("type") || !msg["type"].is_string()) bad_request("message needs a string type");
  const std::string type = msg["type"].get<std::string>();
  const auto spec = std::find_if(client_specs().begin(), client_specs().end(),
                                 [&](const MessageSpec& s) { return type == s.type; });
  if (spec == client_specs().end()) throw Error(ErrorCode::UnknownType, type);
  for (const auto& [key, value] : msg.items()) {
    if (key == "type" || key == "id") continue;
    const auto f = std::find_if(spec->fields.begin(), spec->fields.end(),
                                [&](const FieldSpec& fs) { return key == fs.name; });
    if (f == spec->fields.end()) bad_request("unknown field " + key + " for " + type);
    if (!has_kind(value, f->kind)) bad_request("field " + key + " has the wrong type");
  }
  for (const auto& f : spec->fields) {
    if (f.required && !msg.contains(f.name)) bad_request(type + " needs " + f.name);
  }
  if (type == "load_scenario" && (msg.contains("name") == msg.contains("scenario"))) {
    bad_request("load_scenario needs exactly one of name or scenario");
  }
}

ordered_json error_message(ErrorCode code, const std::string& detail) {
  ordered_json j = typed("error");
  j["code"] = code_name(code);
  j["detail"] = detail;
  return j;
}

ordered_json trace_to_json(const Trace& trace) {
  ordered_json j;
  j["version"] = 1;
  j["scenario"] = trace.scenario;
  j["seed"] = trace.seed;
  j["commands"] = ordered_json::array();
  for (const auto& c : trace.commands) j["commands"].push_back(command_to_json(c));
  return j;
}

Trace trace_from_json(const json& j) {
  if (!j.is_object() || j.value("version", 0) != 1 || !j.contains("scenario") ||
      !j.contains("seed") || !j.contains("commands") || !j["commands"].is_array() ||
      !j["seed"].is_number_unsigned()) {
    throw Error(ErrorCode::ParseError, "trace needs version 1, scenario, seed and commands");
  }
  Trace t;
  t.scenario = j["scenario"];
  t.seed = j["seed"].get<std::uint64_t>();
  for (const auto& c : j["commands"]) t.commands.push_back(command_from_json(c));
  return t;
}

World replay(const Trace& trace) {
  World world = load_scenario(trace.scenario, trace.seed);
  for (const auto& c : trace.commands) {
    try {
      world.apply(c);
    } catch (const Error&) {
    }
  }
  return world;
}

Session::Session(std::string id) : id_(std::move(id)) {}

World& Session::need_world() {
  if (!world_) throw Error(ErrorCode::NoScenario, "load a scenario first");
  return *world_;
}

std::optional<Trace> Session::trace() const {
  if (!world_) return std::nullopt;
  return Trace{scenario_doc_, world_->scenario().seed, world_->trace()};
}

ordered_json Session::world_state() {
  ordered_json j = typed("world_state");
  j["schema_version"] = kSchemaVersion;
  j["session_id"] = id_;
  j["loaded"] = world_.has_value();
  j["auto_tick"] = auto_tick_;
  if (!world_) return j;
  reveal_nearby();
  const World& w = *world_;
  const Reader& r = w.reader(0);
  j["scenario"] = w.scenario().name;
  j["clock"] = w.clock();
  j["bounds"] = {w.scenario().bounds.x(), w.scenario().bounds.y()};
  j["walls"] = ordered_json::array();
  for (const auto& s : w.walls()) j["walls"].push_back({s.a.x(), s.a.y(), s.b.x(), s.b.y()});
  j["regions"] = ordered_json::array();
  for (const auto& reg : w.scenario().regions) {
    j["regions"].push_back({{"name", reg.name},
                            {"rect", {reg.rect.min.x(), reg.rect.min.y(), reg.rect.max.x(),
                                      reg.rect.max.y()}},
                            {"nlos", reg.nlos}});
  }
  j["reader"] = {r.position().x(), r.position().y()};
  bool nfc_available = false;
  j["revealed"] = ordered_json::array();
  for (const Tag& t : w.tags()) {
    const double d = (t.position() - r.position()).norm();
    if (nfc_readable(w.radio(), d)) nfc_available = true;
    if (revealed_.count(t.id()) != 0) {
      j["revealed"].push_back({{"tag_id", t.id().hex()},
                               {"model", model_name(t.model())},
                               {"position", {t.position().x(), t.position().y()}},
                               {"led", t.led_on()}});
    }
  }
  j["nfc_available"] = nfc_available;
  j["inventory_size"] = r.inventory().size();
  return j;
}

ordered_json Session::tag_list() const {
  ordered_json j = typed("tag_list");
  j["tags"] = ordered_json::array();
  if (!world_) return j;
  for (const auto& d : world_->reader(0).discovered()) {
    ordered_json row;
    row["tag_id"] = d.tag_id.hex();
    row["model"] = model_name(d.model);
    row["rssi"] = d.last_rssi;
    row["coarse_distance"] = d.coarse_distance;
    row["last_seen"] = d.last_seen;
    row["action"] = d.model == Model::UwbRaw ? "radar" : "buzz";
    j["tags"].push_back(std::move(row));
  }
  return j;
}

void Session::collect_pushes(std::size_t from, Reply& reply) {
  if (!world_) return;
  const auto& log = world_->event_log();
  for (std::size_t i = from; i < log.size(); ++i) {
    const Event& e = log[i];
    ordered_json push = typed("event");
    push["event"] = event_json(e);
    reply.pushes.push_back(std::move(push));
    if (e.kind == "Audible" && e.fields.value("reader", std::size_t{1}) == 0) {
      ordered_json b = typed("buzzing");
      b["tag_id"] = e.fields["tag"];
      b["level"] = e.fields["level"];
      b["t"] = e.t;
      reply.pushes.push_back(std::move(b));
    }
  }
  reveal_nearby();
}

void Session::reveal_nearby() {
  if (!world_) return;
  const Vec2& p = world_->reader(0).position();
  for (const Tag& t : world_->tags()) {
    if ((t.position() - p).norm() <= kRevealRadius) revealed_.insert(t.id());
  }
}

ordered_json Session::dispatch(const json& msg, std::size_t& log_mark) {
  const std::string type = msg["type"].get<std::string>();

  if (type == "hello") {
    if (msg.contains("session") && msg["session"].get<std::string>() != id_) {
      throw Error(ErrorCode::BadSession, msg["session"].get<std::string>());
    }
    return world_state();
  }
  if (type == "load_scenario") {
    json doc = msg.contains("name") ? bundled_scenario(msg["name"].get<std::string>())
                                    : msg["scenario"];
    std::optional<std::uint64_t> seed;
    if (msg.contains("seed")) seed = msg["seed"].get<std::uint64_t>();
    World w = load_scenario(doc, seed);
    world_.emplace(std::move(w));
    scenario_doc_ = std::move(doc);
    revealed_.clear();
    log_mark = 0;
    return world_state();
  }
  if (type == "auto_tick") {
    auto_tick_ = msg["enabled"].get<bool>();
    return world_state();
  }
  if (type == "list_tags") {
    need_world();
    return tag_list();
  }
  if (type == "get_trace") {
    need_world();
    ordered_json j = typed("trace");
    j["trace"] = trace_to_json(*trace());
    return j;
  }

  World& w = need_world();
  if (type == "step") {
    w.step(msg["dt"].get<double>());
    return world_state();
  }
  if (type == "move") {
    w.move_reader(0, msg["dx"].get<double>(), msg["dy"].get<double>());
    return world_state();
  }
  if (type == "buzz") {
    const TagId id = tag_arg(msg);
    const DiscoveredTag* d = w.reader(0).find(id);
    if (d == nullptr) throw Error(ErrorCode::UnknownTag, id.hex());
    if (d->model != Model::BleAc) throw Error(ErrorCode::NoBuzzer, id.hex() + " has no buzzer");
    std::optional<std::string> pw;
    if (msg.contains("password")) pw = msg["password"].get<std::string>();
    const auto deliveries = w.buzz(0, id, pw);
    std::string result = "not_received";
    for (const auto& del : deliveries) {
      if (del.tag_id == id) result = std::string(result_name(del.result));
    }
    ordered_json j = typed("buzzing");
    j["tag_id"] = id.hex();
    j["result"] = result;
    const Tag* tag = w.find_tag(id);
    j["level"] = tag ? w.audible_level(*tag, w.reader(0).position()) : 0.0;
    j["t"] = w.clock();
    j["tones_hz"] = ordered_json::array();
    for (const auto& tone : buzzer_sequence()) j["tones_hz"].push_back(tone.frequency_hz);
    return j;
  }
  if (type == "radar") {
    const TagId id = tag_arg(msg);
    const RadarResult r = radar_read(w, 0, id);
    if (std::holds_alternative<NotUwb>(r)) {
      throw Error(ErrorCode::NotUwb, id.hex() + " is not a UWB tag");
    }
    ordered_json j = typed("distance");
    j["tag_id"] = id.hex();
    if (const double* m = std::get_if<double>(&r)) {
      j["meters"] = *m;
    } else {
      j["out_of_range"] = true;
    }
    return j;
  }
  if (type == "nfc_read") {
    const NfcRead read = nfc_scan(w, 0);
    ordered_json j = typed("ndef_result");
    j["tag_id"] = read.tag_id.hex();
    j["device_info"] = device_info_to_json(read.device_info);
    j["inventory_size"] = w.reader(0).inventory().size();
    return j;
  }
  if (type == "save_inventory") {
    const std::string path = msg["path"].get<std::string>();
    save_inventory(w.reader(0).inventory(), path);
    ordered_json j = typed("inventory_saved");
    j["path"] = path;
    j["entries"] = w.reader(0).inventory().size();
    return j;
  }
  throw Error(ErrorCode::UnknownType, type);
}

Reply Session::handle(const json& msg) {
  Reply reply;
  std::size_t mark = world_ ? world_->event_log().size() : 0;
  try {
    validate_client_message(msg);
    reply.response = dispatch(msg, mark);
  } catch (const Error& e) {
    reply.response = error_message(e.code(), e.detail());
  } catch (const nlohmann::json::exception& e) {
    reply.response = error_message(ErrorCode::BadRequest, e.what());
  }
  if (msg.is_object() && msg.contains("id")) reply.response["id"] = msg["id"];
  collect_pushes(mark, reply);
  return reply;
}

std::optional<Reply> Session::auto_tick(double dt) {
  if (!auto_tick_ || !world_) return std::nullopt;
  Reply reply;
  const std::size_t mark = world_->event_log().size();
  world_->step(dt);
  reply.response = world_state();
  collect_pushes(mark, reply);
  return reply;
}

std::string SessionManager::create() {
  static thread_local std::mt19937_64 gen{std::random_device{}()};
  std::string id;
  std::lock_guard lock(mutex_);
  do {
    Bytes raw(16);
    for (auto& b : raw) b = static_cast<std::uint8_t>(gen());
    id = to_hex(raw);
  } while (sessions_.count(id) != 0);
  sessions_.emplace(id, std::make_shared<Slot>(id));
  return id;
}

bool SessionManager::exists(const std::string& id) const { return find(id) != nullptr; }

std::shared_ptr<SessionManager::Slot> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Reply SessionManager::handle(const std::string& id, const json& msg) {
  const auto slot = find(id);
  if (!slot) {
    Reply r;
    r.response = error_message(ErrorCode::BadSession, "no session " + id);
    if (msg.is_object() && msg.contains("id")) r.response["id"] = msg["id"];
    return r;
  }
  std::lock_guard lock(slot->mutex);
  return slot->session.handle(msg);
}

std::optional<Reply> SessionManager::auto_tick(const std::string& id, double dt) {
  const auto slot = find(id);
  if (!slot) return std::nullopt;
  std::lock_guard lock(slot->mutex);
  return slot->session.auto_tick(dt);
}

std::optional<Trace> SessionManager::trace(const std::string& id) const {
  const auto slot = find(id);
  if (!slot) return std::nullopt;
  std::lock_guard lock(slot->mutex);
  return slot->session.trace();
}

}  // namespace dial
