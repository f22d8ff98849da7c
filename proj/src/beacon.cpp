/* SPDX-License-Identifier: Apache-2.0 */

#include "dial/beacon.hpp"

#include <numeric>

#include "dial/error.hpp"
#include "dial/hex.hpp"

namespace dial {

namespace {

std::uint8_t byte_sum(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint8_t>(
      std::accumulate(bytes.begin(), bytes.end(), 0u));
}

}  // namespace

std::string_view model_name(Model model) {
  switch (model) {
    case Model::BleAc: return "BLE-AC";
    case Model::UwbRaw: return "UWB-RAW";
  }
  return "unknown";
}

std::optional<Model> parse_model(std::string_view name) {
  if (name == "BLE-AC") return Model::BleAc;
  if (name == "UWB-RAW") return Model::UwbRaw;
  return std::nullopt;
}

std::optional<TagId> TagId::from_hex(std::string_view text) {
  if (text.size() != 2 * kSize) return std::nullopt;
  auto bytes = dial::from_hex(text);
  if (!bytes) return std::nullopt;
  Octets octets{};
  std::copy(bytes->begin(), bytes->end(), octets.begin());
  return TagId(octets);
}

std::string TagId::hex() const { return to_hex(octets_); }

Frame encode_beacon(std::uint8_t version, std::uint8_t model, const TagId& tag_id,
                    std::uint8_t flags) {
  if (!is_known_model(model)) {
    throw Error(ErrorCode::InvalidModel, "model byte " + to_hex(std::span(&model, 1)));
  }
  if ((flags & kReservedFlagMask) != 0) {
    throw Error(ErrorCode::ReservedFlags, "flags byte " + to_hex(std::span(&flags, 1)));
  }
  Frame frame{};
  frame[0] = version;
  frame[1] = model;
  std::copy(tag_id.octets().begin(), tag_id.octets().end(), frame.begin() + 2);
  frame[8] = flags;
  frame[9] = static_cast<std::uint8_t>(kMagic - byte_sum(std::span(frame).first(9)));
  return frame;
}

Frame encode_beacon(const Beacon& beacon) {
  return encode_beacon(beacon.version, static_cast<std::uint8_t>(beacon.model),
                       beacon.tag_id, beacon.flags);
}

Beacon decode_beacon(std::span<const std::uint8_t> frame) {
  if (frame.size() != kFrameSize) {
    throw Error(ErrorCode::WrongLength,
                "expected 10 bytes, got " + std::to_string(frame.size()));
  }
  if (byte_sum(frame) != kMagic) {
    throw Error(ErrorCode::ChecksumMismatch, to_hex(frame));
  }
  Beacon beacon;
  beacon.version = frame[0];
  beacon.model = static_cast<Model>(frame[1]);
  TagId::Octets id{};
  std::copy(frame.begin() + 2, frame.begin() + 8, id.begin());
  beacon.tag_id = TagId(id);
  beacon.flags = frame[8];
  return beacon;
}

Frame make_activation_frame(const Beacon& beacon) {
  Beacon echo = beacon;
  echo.flags |= kFlagActivation;
  return encode_beacon(echo);
}

bool is_dial_frame(std::span<const std::uint8_t> frame) noexcept {
  return frame.size() == kFrameSize && byte_sum(frame) == kMagic;
}

bool is_activation_for(const Beacon& beacon, const TagId& self) {
  return beacon.is_activation() && beacon.tag_id == self;
}

}  // namespace dial
