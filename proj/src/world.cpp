/* SPDX-License-Identifier: Apache-2.0 */

#include "dial/world.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bundled_scenarios.hpp"
#include "dial/error.hpp"

namespace dial {

namespace {

using nlohmann::json;

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }
[[noreturn]] void semantic_error(const std::string& what) {
  throw Error(ErrorCode::SemanticError, what);
}

void only_keys(const json& obj, std::initializer_list<std::string_view> allowed,
               const std::string& where) {
  if (!obj.is_object()) parse_error(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      parse_error("unknown field " + where + "." + key);
    }
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) parse_error(where + " must be a number");
  return j.get<double>();
}

std::string string(const json& j, const std::string& where) {
  if (!j.is_string()) parse_error(where + " must be a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n) {
    parse_error(where + " must be an array of " + std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(number(j[i], where));
  return out;
}

Vec2 point(const json& j, const std::string& where) {
  const auto v = numbers(j, 2, where);
  return Vec2(v[0], v[1]);
}

TagConfig parse_tag(const json& j, std::size_t index) {
  const std::string where = "tags[" + std::to_string(index) + "]";
  only_keys(j, {"id", "model", "position", "ndef", "password", "profile", "label"}, where);
  for (const char* required : {"id", "model", "position", "ndef"}) {
    if (!j.contains(required)) parse_error(where + " is missing " + required);
  }
  TagConfig t;
  const auto id = TagId::from_hex(string(j["id"], where + ".id"));
  if (!id) parse_error(where + ".id must be 12 hex digits");
  t.id = *id;
  const auto model = parse_model(string(j["model"], where + ".model"));
  if (!model) parse_error(where + ".model must be BLE-AC or UWB-RAW");
  t.model = *model;
  t.position = point(j["position"], where + ".position");
  const auto image = from_hex(string(j["ndef"], where + ".ndef"));
  if (!image) parse_error(where + ".ndef must be a hex string");
  t.ndef_image = *image;
  if (j.contains("password")) t.password = string(j["password"], where + ".password");
  if (j.contains("label")) t.label = string(j["label"], where + ".label");
  if (j.contains("profile")) {
    const auto& p = j["profile"];
    only_keys(p, {"idle_mA", "buzz_mA", "uwb_mA", "capacity_mAh"}, where + ".profile");
    CurrentProfile profile = default_profile(t.model);
    if (p.contains("idle_mA")) profile.idle_mA = number(p["idle_mA"], where + ".profile.idle_mA");
    if (p.contains("buzz_mA")) profile.buzz_mA = number(p["buzz_mA"], where + ".profile.buzz_mA");
    if (p.contains("uwb_mA")) profile.uwb_mA = number(p["uwb_mA"], where + ".profile.uwb_mA");
    if (p.contains("capacity_mAh")) {
      t.capacity_mAh = number(p["capacity_mAh"], where + ".profile.capacity_mAh");
    }
    t.profile = profile;
  }
  return t;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  only_keys(doc, {"name", "bounds", "walls", "regions", "radio", "tags", "reader_start", "seed"},
            "scenario");
  if (!doc.contains("bounds")) parse_error("scenario is missing bounds");
  if (!doc.contains("reader_start")) parse_error("scenario is missing reader_start");

  Scenario s;
  if (doc.contains("name")) s.name = string(doc["name"], "name");
  s.bounds = point(doc["bounds"], "bounds");
  if (doc.contains("walls")) {
    if (!doc["walls"].is_array()) parse_error("walls must be an array");
    for (std::size_t i = 0; i < doc["walls"].size(); ++i) {
      const auto v = numbers(doc["walls"][i], 4, "walls[" + std::to_string(i) + "]");
      s.walls.push_back({Vec2(v[0], v[1]), Vec2(v[2], v[3])});
    }
  }
  if (doc.contains("regions")) {
    if (!doc["regions"].is_array()) parse_error("regions must be an array");
    for (std::size_t i = 0; i < doc["regions"].size(); ++i) {
      const std::string where = "regions[" + std::to_string(i) + "]";
      const auto& r = doc["regions"][i];
      only_keys(r, {"name", "rect", "nlos"}, where);
      if (!r.contains("rect")) parse_error(where + " is missing rect");
      Region region;
      if (r.contains("name")) region.name = string(r["name"], where + ".name");
      const auto v = numbers(r["rect"], 4, where + ".rect");
      region.rect = {Vec2(std::min(v[0], v[2]), std::min(v[1], v[3])),
                     Vec2(std::max(v[0], v[2]), std::max(v[1], v[3]))};
      if (r.contains("nlos")) {
        if (!r["nlos"].is_boolean()) parse_error(where + ".nlos must be a boolean");
        region.nlos = r["nlos"].get<bool>();
      }
      s.regions.push_back(std::move(region));
    }
  }
  if (doc.contains("radio")) {
    try {
      s.radio = radio_from_json(doc["radio"]);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidParams) semantic_error("radio: " + e.detail());
      throw;
    }
  }
  if (doc.contains("tags")) {
    if (!doc["tags"].is_array()) parse_error("tags must be an array");
    for (std::size_t i = 0; i < doc["tags"].size(); ++i) {
      s.tags.push_back(parse_tag(doc["tags"][i], i));
    }
  }
  s.reader_start = point(doc["reader_start"], "reader_start");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      parse_error("seed must be a non-negative integer");
    }
    if (doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() < 0) {
      parse_error("seed must be a non-negative integer");
    }
    s.seed = doc["seed"].get<std::uint64_t>();
  }

  // Semantics.
  if (!(s.bounds.x() > 0.0) || !(s.bounds.y() > 0.0)) semantic_error("bounds must be positive");
  const Rect area{Vec2::Zero(), s.bounds};
  if (!area.contains(s.reader_start)) semantic_error("reader_start is outside the bounds");
  std::set<TagId> ids;
  for (const auto& t : s.tags) {
    if (!area.contains(t.position)) semantic_error("tag " + t.id.hex() + " is outside the bounds");
    if (!ids.insert(t.id).second) semantic_error("duplicate tag id " + t.id.hex());
    try {
      unpack_device_info(ndef::decode_message(t.ndef_image));
    } catch (const Error& e) {
      semantic_error("tag " + t.id.hex() + " has an unreadable NDEF image: " + e.what());
    }
    if (t.password && (t.password->size() < 4 || t.password->size() > 32)) {
      semantic_error("tag " + t.id.hex() + " password must be 4-32 bytes");
    }
    if (!(t.capacity_mAh > 0.0)) semantic_error("tag " + t.id.hex() + " capacity must be > 0");
  }
  return s;
}

nlohmann::ordered_json scenario_to_json(const Scenario& s) {
  nlohmann::ordered_json j;
  if (!s.name.empty()) j["name"] = s.name;
  j["bounds"] = {s.bounds.x(), s.bounds.y()};
  j["walls"] = nlohmann::ordered_json::array();
  for (const auto& w : s.walls) j["walls"].push_back({w.a.x(), w.a.y(), w.b.x(), w.b.y()});
  j["regions"] = nlohmann::ordered_json::array();
  for (const auto& r : s.regions) {
    nlohmann::ordered_json rj;
    rj["name"] = r.name;
    rj["rect"] = {r.rect.min.x(), r.rect.min.y(), r.rect.max.x(), r.rect.max.y()};
    rj["nlos"] = r.nlos;
    j["regions"].push_back(std::move(rj));
  }
  j["radio"] = radio_to_json(s.radio);
  j["tags"] = nlohmann::ordered_json::array();
  for (const auto& t : s.tags) {
    nlohmann::ordered_json tj;
    tj["id"] = t.id.hex();
    tj["model"] = model_name(t.model);
    tj["position"] = {t.position.x(), t.position.y()};
    tj["ndef"] = to_hex(t.ndef_image);
    if (!t.label.empty()) tj["label"] = t.label;
    if (t.password) tj["password"] = *t.password;
    if (t.profile || t.capacity_mAh != 6000.0) {
      const CurrentProfile p = t.profile.value_or(default_profile(t.model));
      tj["profile"] = {{"idle_mA", p.idle_mA},
                       {"buzz_mA", p.buzz_mA},
                       {"uwb_mA", p.uwb_mA},
                       {"capacity_mAh", t.capacity_mAh}};
    }
    j["tags"].push_back(std::move(tj));
  }
  j["reader_start"] = {s.reader_start.x(), s.reader_start.y()};
  j["seed"] = s.seed;
  return j;
}

std::vector<std::string> bundled_scenario_names() {
  std::vector<std::string> names;
  for (const auto& b : kBundledScenarios) names.emplace_back(b.name);
  return names;
}

nlohmann::json bundled_scenario(std::string_view name) {
  for (const auto& b : kBundledScenarios) {
    if (b.name == name) return nlohmann::json::parse(b.text);
  }
  parse_error("no bundled scenario named " + std::string(name));
}

std::string Event::to_line() const {
  nlohmann::ordered_json j;
  j["t"] = t;
  j["kind"] = kind;
  for (const auto& [key, value] : fields.items()) j[key] = value;
  return j.dump();
}

std::string events_to_text(std::span<const Event> events) {
  std::string out;
  for (const auto& e : events) {
    out += e.to_line();
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json command_to_json(const Command& c) {
  nlohmann::ordered_json j;
  switch (c.kind) {
    case Command::Kind::Step:
      j["cmd"] = "step";
      j["dt"] = c.dt;
      break;
    case Command::Kind::Move:
      j["cmd"] = "move";
      j["reader"] = c.reader;
      j["dx"] = c.dx;
      j["dy"] = c.dy;
      break;
    case Command::Kind::Buzz:
      j["cmd"] = "buzz";
      j["reader"] = c.reader;
      j["tag"] = c.tag.hex();
      if (c.password) j["password"] = *c.password;
      break;
    case Command::Kind::Radar:
      j["cmd"] = "radar";
      j["reader"] = c.reader;
      j["tag"] = c.tag.hex();
      break;
    case Command::Kind::NfcRead:
      j["cmd"] = "nfc_read";
      j["reader"] = c.reader;
      break;
    case Command::Kind::AddReader:
      j["cmd"] = "add_reader";
      j["x"] = c.dx;
      j["y"] = c.dy;
      break;
  }
  return j;
}

Command command_from_json(const json& j) {
  if (!j.is_object() || !j.contains("cmd")) parse_error("command needs a cmd field");
  const std::string name = string(j["cmd"], "cmd");
  Command c;
  auto reader = [&] {
    if (j.contains("reader")) {
      if (!j["reader"].is_number_unsigned()) parse_error("reader must be a non-negative integer");
      c.reader = j["reader"].get<std::size_t>();
    }
  };
  auto tag = [&] {
    if (!j.contains("tag")) parse_error(name + " needs a tag");
    const auto id = TagId::from_hex(string(j["tag"], "tag"));
    if (!id) parse_error("tag must be 12 hex digits");
    c.tag = *id;
  };
  auto need = [&](const char* key) -> double {
    if (!j.contains(key)) parse_error(name + " needs " + key);
    return number(j[key], key);
  };
  if (name == "step") {
    only_keys(j, {"cmd", "dt"}, "step");
    c.kind = Command::Kind::Step;
    c.dt = need("dt");
  } else if (name == "move") {
    only_keys(j, {"cmd", "reader", "dx", "dy"}, "move");
    c.kind = Command::Kind::Move;
    reader();
    c.dx = need("dx");
    c.dy = need("dy");
  } else if (name == "buzz") {
    only_keys(j, {"cmd", "reader", "tag", "password"}, "buzz");
    c.kind = Command::Kind::Buzz;
    reader();
    tag();
    if (j.contains("password")) c.password = string(j["password"], "password");
  } else if (name == "radar") {
    only_keys(j, {"cmd", "reader", "tag"}, "radar");
    c.kind = Command::Kind::Radar;
    reader();
    tag();
  } else if (name == "nfc_read") {
    only_keys(j, {"cmd", "reader"}, "nfc_read");
    c.kind = Command::Kind::NfcRead;
    reader();
  } else if (name == "add_reader") {
    only_keys(j, {"cmd", "x", "y"}, "add_reader");
    c.kind = Command::Kind::AddReader;
    c.dx = need("x");
    c.dy = need("y");
  } else {
    parse_error("unknown command " + name);
  }
  return c;
}

World::World(Scenario scenario) : scenario_(std::move(scenario)), rng_(scenario_.seed) {
  validate(scenario_.radio);
  for (const auto& t : scenario_.tags) tags_.emplace_back(t);
  readers_.emplace_back(scenario_.reader_start, scenario_.radio);
}

Reader& World::reader(std::size_t index) {
  if (index >= readers_.size()) throw Error(ErrorCode::NoSuchReader, std::to_string(index));
  return readers_[index];
}

const Reader& World::reader(std::size_t index) const {
  if (index >= readers_.size()) throw Error(ErrorCode::NoSuchReader, std::to_string(index));
  return readers_[index];
}

Tag* World::find_tag(const TagId& id) {
  const auto it = std::find_if(tags_.begin(), tags_.end(), [&](const Tag& t) { return t.id() == id; });
  return it == tags_.end() ? nullptr : &*it;
}

const Tag* World::find_tag(const TagId& id) const {
  return const_cast<World*>(this)->find_tag(id);
}

int World::region_crossings(const Vec2& a, const Vec2& b) const {
  int n = 0;
  for (const auto& r : scenario_.regions) {
    if (r.nlos && r.rect.contains(a) != r.rect.contains(b)) ++n;
  }
  return n;
}

double World::audible_level(const Tag& tag, const Vec2& listener) const {
  if (!tag.buzzing()) return 0.0;
  const double d = (tag.position() - listener).norm();
  return 1.0 / (1.0 + d * d);
}

std::size_t World::add_reader(const Vec2& position) {
  Command c;
  c.kind = Command::Kind::AddReader;
  c.dx = position.x();
  c.dy = position.y();
  record(c);
  readers_.emplace_back(bounds().clamp(position), scenario_.radio);
  Event e{clock(), "AddReader"};
  e.fields["reader"] = readers_.size() - 1;
  e.fields["x"] = readers_.back().position().x();
  e.fields["y"] = readers_.back().position().y();
  log(std::move(e));
  return readers_.size() - 1;
}

std::vector<Event> World::step(double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
  Command c;
  c.kind = Command::Kind::Step;
  c.dt = dt;
  record(c);

  const std::size_t first = log_.size();
  std::int64_t remaining = std::max<std::int64_t>(1, std::llround(dt * 1000.0));
  while (remaining > 0) {
    const std::int64_t h = std::min(kSubStepMs, remaining);
    sub_step(clock_ms_ + h);
    remaining -= h;
  }
  Event e{clock(), "ClockAdvance"};
  log(std::move(e));
  return {log_.begin() + static_cast<std::ptrdiff_t>(first), log_.end()};
}

void World::sub_step(std::int64_t until_ms) {
  clock_ms_ = until_ms;
  const double now = clock();

  struct Pending {
    std::size_t tag;
    Emission emission;
  };
  std::vector<Pending> pending;
  for (std::size_t i = 0; i < tags_.size(); ++i) {
    for (auto& e : tags_[i].tick(now)) pending.push_back({i, e});
  }
  std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    return a.emission.t < b.emission.t;
  });

  for (const auto& p : pending) {
    const Tag& tag = tags_[p.tag];
    const Emission& em = p.emission;
    Event e{em.t, ""};
    e.fields["tag"] = tag.id().hex();
    switch (em.kind) {
      case Emission::Kind::BeaconTx:
        e.kind = "BeaconTx";
        log(std::move(e));
        deliver_beacon(tag, em);
        continue;
      case Emission::Kind::ToneStart:
        e.kind = "ToneStart";
        e.fields["tone"] = em.tone_index;
        e.fields["frequency_hz"] = em.frequency_hz;
        break;
      case Emission::Kind::BuzzStop: e.kind = "BuzzStop"; break;
      case Emission::Kind::LedOn: e.kind = "LedOn"; break;
      case Emission::Kind::LedOff: e.kind = "LedOff"; break;
      case Emission::Kind::Depleted: e.kind = "Depleted"; break;
    }
    log(std::move(e));
  }

  for (const Tag& tag : tags_) {
    if (!tag.buzzing()) continue;
    for (std::size_t r = 0; r < readers_.size(); ++r) {
      Event e{now, "Audible"};
      e.fields["tag"] = tag.id().hex();
      e.fields["reader"] = r;
      e.fields["level"] = audible_level(tag, readers_[r].position());
      log(std::move(e));
    }
  }

  for (std::size_t r = 0; r < readers_.size(); ++r) {
    for (const auto& id : readers_[r].expire(now)) {
      Event e{now, "TagExpired"};
      e.fields["reader"] = r;
      e.fields["tag"] = id.hex();
      log(std::move(e));
    }
  }
}

void World::deliver_beacon(const Tag& tag, const Emission& em) {
  for (std::size_t r = 0; r < readers_.size(); ++r) {
    Reader& reader = readers_[r];
    const auto rssi =
        ble_deliver(scenario_.radio, tag.position(), reader.position(), scenario_.walls, rng_,
                    region_crossings(tag.position(), reader.position()));
    if (!rssi) continue;
    reader.on_frame(em.frame, *rssi, em.t);
    Event e{em.t, "BeaconRx"};
    e.fields["reader"] = r;
    e.fields["tag"] = tag.id().hex();
    e.fields["rssi"] = *rssi;
    log(std::move(e));
  }
}

Vec2 World::preview_move(const Vec2& from, double dx, double dy) const {
  const Vec2 target = bounds().clamp(from + Vec2(dx, dy));
  const Vec2 delta = target - from;
  const double len = delta.norm();
  if (len == 0.0) return from;
  std::optional<double> hit;
  for (const auto& w : scenario_.walls) {
    if (auto t = crossing_param(from, target, w)) hit = hit ? std::min(*hit, *t) : *t;
  }
  if (!hit) return target;
  const double travel = std::max(0.0, *hit * len - kWallStandoff);
  return from + delta / len * travel;
}

Vec2 World::move_reader(std::size_t reader_index, double dx, double dy) {
  Command c;
  c.kind = Command::Kind::Move;
  c.reader = reader_index;
  c.dx = dx;
  c.dy = dy;
  record(c);
  Reader& r = reader(reader_index);
  r.set_position(preview_move(r.position(), dx, dy));
  Event e{clock(), "ReaderMove"};
  e.fields["reader"] = reader_index;
  e.fields["x"] = r.position().x();
  e.fields["y"] = r.position().y();
  log(std::move(e));
  return r.position();
}

std::vector<ActivationDelivery> World::buzz(std::size_t reader_index, const TagId& id,
                                            std::optional<std::string> password) {
  Command c;
  c.kind = Command::Kind::Buzz;
  c.reader = reader_index;
  c.tag = id;
  c.password = password;
  record(c);

  Reader& r = reader(reader_index);
  const BuzzRequest req = r.request_buzz(id, std::move(password));
  Event tx{clock(), "ActivationTx"};
  tx.fields["reader"] = reader_index;
  tx.fields["tag"] = id.hex();
  log(std::move(tx));

  std::vector<ActivationDelivery> out;
  for (Tag& tag : tags_) {
    const auto rssi = ble_deliver(scenario_.radio, r.position(), tag.position(), scenario_.walls,
                                  rng_, region_crossings(r.position(), tag.position()));
    if (!rssi) continue;
    const auto result =
        tag.on_frame(req.frame, req.password ? std::optional<std::string_view>(*req.password)
                                             : std::nullopt);
    Event rx{clock(), "ActivationRx"};
    rx.fields["tag"] = tag.id().hex();
    rx.fields["result"] = result_name(result);
    log(std::move(rx));
    out.push_back({tag.id(), result});
  }
  return out;
}

std::vector<Event> World::apply(const Command& c) {
  const std::size_t first = log_.size();
  switch (c.kind) {
    case Command::Kind::Step: step(c.dt); break;
    case Command::Kind::Move: move_reader(c.reader, c.dx, c.dy); break;
    case Command::Kind::Buzz: buzz(c.reader, c.tag, c.password); break;
    case Command::Kind::Radar: radar_read(*this, c.reader, c.tag); break;
    case Command::Kind::NfcRead: nfc_scan(*this, c.reader); break;
    case Command::Kind::AddReader: add_reader(Vec2(c.dx, c.dy)); break;
  }
  return {log_.begin() + static_cast<std::ptrdiff_t>(first), log_.end()};
}

std::string World::event_log_text() const { return events_to_text(log_); }

World load_scenario(const nlohmann::json& doc, std::optional<std::uint64_t> seed_override) {
  Scenario s = parse_scenario(doc);
  if (seed_override) s.seed = *seed_override;
  return World(std::move(s));
}

}  // namespace dial
