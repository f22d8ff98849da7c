/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <string>
#include <vector>

#include "dial/beacon.hpp"
#include "dial/ndef.hpp"
#include "dial/tag.hpp"
#include "dial/world.hpp"

namespace dial::test {

inline TagId id_of(const std::string& hex) { return *TagId::from_hex(hex); }

inline DeviceInfo sample_info(const std::string& name) {
  DeviceInfo info;
  info.name = name;
  info.vendor = "Acme";
  info.url = "https://www.example.com/" + name;
  info.functionalities = "reports temperature";
  info.data_collection = "none";
  info.firmware_version = "1.0.0";
  return info;
}

inline TagConfig make_tag(const std::string& hex, Model model, Vec2 pos,
                          std::optional<std::string> password = std::nullopt) {
  TagConfig t;
  t.id = id_of(hex);
  t.model = model;
  t.position = pos;
  t.ndef_image = ndef::encode_message(pack_device_info(sample_info("dev-" + hex)));
  t.password = std::move(password);
  t.label = hex;
  return t;
}

/// Wall-free room with noiseless radio.
inline Scenario open_room(Vec2 size, Vec2 start, std::vector<TagConfig> tags,
                          std::uint64_t seed = 7) {
  Scenario s;
  s.name = "room";
  s.bounds = size;
  s.reader_start = start;
  s.tags = std::move(tags);
  s.seed = seed;
  s.radio.uwb_sigma = 0.0;
  return s;
}

inline std::size_t count_kind(const World& w, const std::string& kind) {
  std::size_t n = 0;
  for (const auto& e : w.event_log()) n += e.kind == kind;
  return n;
}

}  // namespace dial::test
