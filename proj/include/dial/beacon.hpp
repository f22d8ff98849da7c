/* SPDX-License-Identifier: Apache-2.0 */

/** DIAL advertising frames.
 *
 * A frame is 10 octets:
 *
 *     offset 0  version
 *     offset 1  model       0x01 = BLE-AC, 0x02 = UWB-RAW
 *     offset 2  tag id      6 octets, opaque
 *     offset 8  flags       bit 0 = activation echo, bits 1..7 reserved (0)
 *     offset 9  checksum    chosen so all 10 octets sum to kMagic mod 256
 *
 * Frames never carry anything about the device a tag is attached to; the
 * bytes are a pure function of (version, model, tag id, flags).
 *
 * The reader "echoes" a tag's beacon back with the activation flag set to
 * make that one tag buzz.  The flag keeps a tag from triggering on a relayed
 * copy of its own beacon. */

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace dial {

inline constexpr std::size_t kFrameSize = 10;
inline constexpr std::uint8_t kMagic = 0xD1;
inline constexpr std::uint8_t kProtocolVersion = 0x01;
inline constexpr std::uint8_t kFlagActivation = 0x01;
inline constexpr std::uint8_t kReservedFlagMask = 0xFE;

using Frame = std::array<std::uint8_t, kFrameSize>;

enum class Model : std::uint8_t { BleAc = 0x01, UwbRaw = 0x02 };

constexpr bool is_known_model(std::uint8_t raw) { return raw == 0x01 || raw == 0x02; }
std::string_view model_name(Model model);
/// "BLE-AC" / "UWB-RAW"; nullopt otherwise.
std::optional<Model> parse_model(std::string_view name);

class TagId {
 public:
  static constexpr std::size_t kSize = 6;
  using Octets = std::array<std::uint8_t, kSize>;

  constexpr TagId() = default;
  constexpr explicit TagId(const Octets& octets) : octets_(octets) {}

  /// Exactly 12 hex digits.
  static std::optional<TagId> from_hex(std::string_view text);
  std::string hex() const;

  const Octets& octets() const { return octets_; }

  auto operator<=>(const TagId&) const = default;

 private:
  Octets octets_{};
};

struct Beacon {
  std::uint8_t version = kProtocolVersion;
  Model model = Model::BleAc;
  TagId tag_id;
  std::uint8_t flags = 0;

  bool is_activation() const { return (flags & kFlagActivation) != 0; }

  bool operator==(const Beacon&) const = default;
};

/// Throws Error{InvalidModel} or Error{ReservedFlags}.
Frame encode_beacon(std::uint8_t version, std::uint8_t model, const TagId& tag_id,
                    std::uint8_t flags);
Frame encode_beacon(const Beacon& beacon);

/// Accepts any 10-octet input whose sum matches kMagic; model and flag
/// bytes are returned as-is.  Throws Error{WrongLength} or
/// Error{ChecksumMismatch}.
Beacon decode_beacon(std::span<const std::uint8_t> frame);

/// Re-encodes `beacon` with the activation flag set.
Frame make_activation_frame(const Beacon& beacon);

/// True iff decode_beacon would succeed.
bool is_dial_frame(std::span<const std::uint8_t> frame) noexcept;

/// Activation flag set and addressed to `self`.
bool is_activation_for(const Beacon& beacon, const TagId& self);

}  // namespace dial
