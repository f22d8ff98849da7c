/* SPDX-License-Identifier: Apache-2.0 */

/** The reader side: what a phone running the tag app sees and does.
 *
 * Readers never pair with tags.  Any reader can list, buzz and range any
 * tag it hears.  Device information is only obtainable through nfc_scan,
 * which requires the reader to be within 10 cm of the tag. */

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dial/beacon.hpp"
#include "dial/geometry.hpp"
#include "dial/ndef.hpp"
#include "dial/radio.hpp"
#include "json.hpp"

namespace dial {

class World;

inline constexpr double kDefaultStaleTimeout = 10.0;

struct DiscoveredTag {
  TagId tag_id;
  Model model = Model::BleAc;
  std::uint8_t version = kProtocolVersion;
  double last_rssi = 0.0;
  double last_seen = 0.0;
  double coarse_distance = 0.0;

  bool operator==(const DiscoveredTag&) const = default;
};

struct InventoryEntry {
  TagId tag_id;
  DeviceInfo device_info;
  double read_at = 0.0;
  Vec2 read_position = Vec2::Zero();

  bool operator==(const InventoryEntry&) const = default;
};

struct BuzzRequest {
  TagId tag_id;
  Frame frame{};
  /// Sent alongside the frame, never inside it.
  std::optional<std::string> password;
};

struct OutOfRange {
  bool operator==(const OutOfRange&) const = default;
};
struct NotUwb {
  bool operator==(const NotUwb&) const = default;
};
using RadarResult = std::variant<double, OutOfRange, NotUwb>;

class Reader {
 public:
  explicit Reader(Vec2 position, PropagationParams radio = {}, bool uwb_capable = true,
                  double stale_timeout = kDefaultStaleTimeout);

  /// Upserts a DiscoveredTag for a DIAL beacon of a known model; anything
  /// else (including activation echoes) is ignored.  Returns true on upsert.
  bool on_frame(std::span<const std::uint8_t> frame, double rssi, double now);

  /// Drops tags not heard for more than stale_timeout; returns their ids.
  std::vector<TagId> expire(double now);

  /// Sorted by tag id.
  std::vector<DiscoveredTag> discovered() const;
  const DiscoveredTag* find(const TagId& id) const;

  /// Throws Error{UnknownTag} for a tag that is not in the list.
  BuzzRequest request_buzz(const TagId& id,
                           std::optional<std::string> password = std::nullopt) const;

  const Vec2& position() const { return position_; }
  void set_position(const Vec2& p) { position_ = p; }
  bool uwb_capable() const { return uwb_capable_; }
  double stale_timeout() const { return stale_timeout_; }
  const PropagationParams& radio() const { return radio_; }

  const std::vector<InventoryEntry>& inventory() const { return inventory_; }
  /// Appends and, when an inventory path is set, rewrites the file.
  void add_inventory(InventoryEntry entry);
  void set_inventory(std::vector<InventoryEntry> entries) { inventory_ = std::move(entries); }
  void set_inventory_path(std::optional<std::filesystem::path> path) {
    inventory_path_ = std::move(path);
  }

 private:
  Vec2 position_;
  PropagationParams radio_;
  bool uwb_capable_;
  double stale_timeout_;
  std::map<TagId, DiscoveredTag> discovered_;
  std::vector<InventoryEntry> inventory_;
  std::optional<std::filesystem::path> inventory_path_;
};

/// UWB distance from reader `reader_index` to a discovered tag.  Throws
/// Error{UnknownTag}, Error{NotUwbCapable} or Error{NoSuchReader}.
RadarResult radar_read(World& world, std::size_t reader_index, const TagId& id);

struct NfcRead {
  TagId tag_id;
  DeviceInfo device_info;
};

/// Reads the nearest tag within NFC range (ties go to the smaller id),
/// appends it to the reader's inventory and returns it.  Throws
/// Error{NothingInRange} or Error{NoSuchReader}.
NfcRead nfc_scan(World& world, std::size_t reader_index);

nlohmann::ordered_json device_info_to_json(const DeviceInfo& info);
/// Throws Error{MalformedFile} on a bad shape.
DeviceInfo device_info_from_json(const nlohmann::json& j);

nlohmann::ordered_json inventory_to_json(std::span<const InventoryEntry> entries);
std::vector<InventoryEntry> inventory_from_json(const nlohmann::json& j);

/// Throws Error{IoError}.
void save_inventory(std::span<const InventoryEntry> entries, const std::filesystem::path& path);
/// Throws Error{IoError} or Error{MalformedFile}.
std::vector<InventoryEntry> load_inventory(const std::filesystem::path& path);

}  // namespace dial
