/* SPDX-License-Identifier: Apache-2.0 */

#include "dial/reader.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dial/error.hpp"
#include "dial/world.hpp"

namespace dial {

Reader::Reader(Vec2 position, PropagationParams radio, bool uwb_capable, double stale_timeout)
    : position_(std::move(position)),
      radio_(radio),
      uwb_capable_(uwb_capable),
      stale_timeout_(stale_timeout) {}

bool Reader::on_frame(std::span<const std::uint8_t> frame, double rssi, double now) {
  if (!is_dial_frame(frame)) return false;
  const Beacon b = decode_beacon(frame);
  if (b.is_activation() || !is_known_model(static_cast<std::uint8_t>(b.model))) return false;
  DiscoveredTag& d = discovered_[b.tag_id];
  d.tag_id = b.tag_id;
  d.model = b.model;
  d.version = b.version;
  d.last_rssi = rssi;
  d.last_seen = now;
  d.coarse_distance = distance_from_rssi(radio_, rssi);
  return true;
}

std::vector<TagId> Reader::expire(double now) {
  std::vector<TagId> gone;
  for (auto it = discovered_.begin(); it != discovered_.end();) {
    if (now - it->second.last_seen > stale_timeout_ + 1e-9) {
      gone.push_back(it->first);
      it = discovered_.erase(it);
    } else {
      ++it;
    }
  }
  return gone;
}

std::vector<DiscoveredTag> Reader::discovered() const {
  std::vector<DiscoveredTag> out;
  out.reserve(discovered_.size());
  for (const auto& [id, d] : discovered_) out.push_back(d);
  return out;
}

const DiscoveredTag* Reader::find(const TagId& id) const {
  const auto it = discovered_.find(id);
  return it == discovered_.end() ? nullptr : &it->second;
}

BuzzRequest Reader::request_buzz(const TagId& id, std::optional<std::string> password) const {
  const DiscoveredTag* d = find(id);
  if (d == nullptr) throw Error(ErrorCode::UnknownTag, id.hex());
  Beacon b;
  b.version = d->version;
  b.model = d->model;
  b.tag_id = d->tag_id;
  return BuzzRequest{id, make_activation_frame(b), std::move(password)};
}

void Reader::add_inventory(InventoryEntry entry) {
  inventory_.push_back(std::move(entry));
  if (inventory_path_) save_inventory(inventory_, *inventory_path_);
}

RadarResult radar_read(World& world, std::size_t reader_index, const TagId& id) {
  Command cmd;
  cmd.kind = Command::Kind::Radar;
  cmd.reader = reader_index;
  cmd.tag = id;
  world.record(cmd);

  Reader& reader = world.reader(reader_index);
  const DiscoveredTag* d = reader.find(id);
  const Tag* tag = world.find_tag(id);
  if (d == nullptr || tag == nullptr) throw Error(ErrorCode::UnknownTag, id.hex());
  if (!reader.uwb_capable()) {
    throw Error(ErrorCode::NotUwbCapable, "reader has no UWB radio or adapter");
  }

  Event e{world.clock(), "RadarRead"};
  e.fields["reader"] = reader_index;
  e.fields["tag"] = id.hex();
  RadarResult result = NotUwb{};
  if (tag->model() != Model::UwbRaw) {
    e.fields["result"] = "not_uwb";
  } else {
    const double true_d = (tag->position() - reader.position()).norm();
    const bool nlos = world.nlos_between(reader.position(), tag->position());
    if (auto est = uwb_range_estimate(world.radio(), true_d, nlos, world.rng())) {
      result = *est;
      e.fields["result"] = *est;
    } else {
      result = OutOfRange{};
      e.fields["result"] = "out_of_range";
    }
  }
  world.log(std::move(e));
  return result;
}

NfcRead nfc_scan(World& world, std::size_t reader_index) {
  Command cmd;
  cmd.kind = Command::Kind::NfcRead;
  cmd.reader = reader_index;
  world.record(cmd);

  Reader& reader = world.reader(reader_index);
  const Tag* best = nullptr;
  double best_d = 0.0;
  for (const Tag& tag : world.tags()) {
    const double d = (tag.position() - reader.position()).norm();
    if (!nfc_readable(world.radio(), d)) continue;
    if (best == nullptr || d < best_d || (d == best_d && tag.id() < best->id())) {
      best = &tag;
      best_d = d;
    }
  }

  Event e{world.clock(), "NfcRead"};
  e.fields["reader"] = reader_index;
  if (best == nullptr) {
    e.fields["tag"] = nullptr;
    world.log(std::move(e));
    throw Error(ErrorCode::NothingInRange, "no tag within 0.10 m");
  }
  e.fields["tag"] = best->id().hex();
  world.log(std::move(e));

  NfcRead read{best->id(), unpack_device_info(ndef::decode_message(best->ndef_image()))};
  reader.add_inventory(InventoryEntry{read.tag_id, read.device_info, world.clock(),
                                      reader.position()});
  return read;
}

namespace {

struct InfoField {
  const char* key;
  std::string DeviceInfo::*member;
};

constexpr InfoField kInfoFields[] = {
    {"name", &DeviceInfo::name},
    {"vendor", &DeviceInfo::vendor},
    {"url", &DeviceInfo::url},
    {"functionalities", &DeviceInfo::functionalities},
    {"data_collection", &DeviceInfo::data_collection},
    {"firmware_version", &DeviceInfo::firmware_version},
    {"vulnerability_notes", &DeviceInfo::vulnerability_notes},
};

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedFile, what); }

Vec2 read_point(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    malformed("expected [x, y]");
  }
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

nlohmann::ordered_json device_info_to_json(const DeviceInfo& info) {
  nlohmann::ordered_json j;
  for (const auto& f : kInfoFields) j[f.key] = info.*(f.member);
  if (info.buzzer_password) j["buzzer_password"] = *info.buzzer_password;
  return j;
}

DeviceInfo device_info_from_json(const nlohmann::json& j) {
  if (!j.is_object()) malformed("device_info must be an object");
  DeviceInfo info;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string()) malformed("device_info." + key + " must be a string");
    if (key == "buzzer_password") {
      info.buzzer_password = value.get<std::string>();
      continue;
    }
    const auto it = std::find_if(std::begin(kInfoFields), std::end(kInfoFields),
                                 [&](const InfoField& f) { return key == f.key; });
    if (it == std::end(kInfoFields)) malformed("unknown device_info field " + key);
    info.*(it->member) = value.get<std::string>();
  }
  if (info.url.empty()) malformed("device_info.url is required");
  return info;
}

nlohmann::ordered_json inventory_to_json(std::span<const InventoryEntry> entries) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json row;
    row["tag_id"] = e.tag_id.hex();
    row["device_info"] = device_info_to_json(e.device_info);
    row["read_at"] = e.read_at;
    row["read_position"] = {e.read_position.x(), e.read_position.y()};
    j["entries"].push_back(std::move(row));
  }
  return j;
}

std::vector<InventoryEntry> inventory_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("version") || !j.contains("entries")) {
    malformed("inventory needs version and entries");
  }
  if (j["version"] != 1) malformed("unsupported inventory version");
  if (!j["entries"].is_array()) malformed("entries must be an array");
  std::vector<InventoryEntry> out;
  for (const auto& row : j["entries"]) {
    if (!row.is_object() || !row.contains("tag_id") || !row.contains("device_info") ||
        !row.contains("read_at") || !row.contains("read_position")) {
      malformed("entry is missing fields");
    }
    if (!row["tag_id"].is_string() || !row["read_at"].is_number()) malformed("bad entry types");
    InventoryEntry e;
    const auto id = TagId::from_hex(row["tag_id"].get<std::string>());
    if (!id) malformed("tag_id must be 12 hex digits");
    e.tag_id = *id;
    e.device_info = device_info_from_json(row["device_info"]);
    e.read_at = row["read_at"].get<double>();
    e.read_position = read_point(row["read_position"]);
    out.push_back(std::move(e));
  }
  return out;
}

void save_inventory(std::span<const InventoryEntry> entries, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << inventory_to_json(entries).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::vector<InventoryEntry> load_inventory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const auto j = nlohmann::json::parse(buf.str(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) malformed(path.string() + " is not valid JSON");
  return inventory_from_json(j);
}

}  // namespace dial
