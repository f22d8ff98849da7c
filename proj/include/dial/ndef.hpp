/* SPDX-License-Identifier: Apache-2.0 */

/** NDEF messages for the NFC sticker on each tag.
 *
 * Record framing follows the NFC Forum NDEF layout (header octet with
 * MB/ME/CF/SR/IL/TNF, type length, 1- or 4-octet payload length, optional
 * id length, then type, id and payload).  Chunked records are not
 * supported.
 *
 * Device information is packed as a URI record followed by one text record
 * per populated field; the field key is carried in the record id.  The
 * buzzer password goes in an external-type record marked local-only, so it
 * can be filtered out of anything that leaves the NFC read path. */

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dial/hex.hpp"

namespace dial::ndef {

enum class Tnf : std::uint8_t {
  Empty = 0x00,
  WellKnown = 0x01,
  Media = 0x02,
  AbsoluteUri = 0x03,
  External = 0x04,
  Unknown = 0x05,
  Unchanged = 0x06,
  Reserved = 0x07,
};

inline constexpr std::size_t kMaxPayload = 65535;
/// External type of local-only records.
inline constexpr std::string_view kLocalRecordType = "dialtag.local:pw";

struct Record {
  Tnf tnf = Tnf::Empty;
  Bytes type;
  std::optional<Bytes> id;
  Bytes payload;

  bool operator==(const Record&) const = default;
};

using Message = std::vector<Record>;

/// Throws Error{EmptyMessage} for no records, Error{PayloadTooLarge} when a
/// payload exceeds kMaxPayload or a type/id exceeds 255 octets.
Bytes encode_message(const Message& records);

/// Throws Error{EmptyMessage}, Error{Truncated} or Error{BadHeader}.
Message decode_message(std::span<const std::uint8_t> bytes);

/// Longest matching abbreviation wins.  Throws Error{InvalidUri} unless the
/// text is an absolute URI (scheme ":" ...).
Record encode_uri(std::string_view uri);
/// Throws Error{NotAUriRecord} or Error{UnknownPrefixCode}.
std::string decode_uri(const Record& record);

/// Well-known "T" record, UTF-8, language "en".
Record encode_text(std::string_view text, std::string_view key);
/// Returns nullopt for records that are not UTF-8 text records.
std::optional<std::string> decode_text(const Record& record);

bool is_uri_record(const Record& record);
bool is_local_only(const Record& record);

bool is_valid_utf8(std::string_view text);
bool is_absolute_uri(std::string_view text);

}  // namespace dial::ndef

namespace dial {

struct DeviceInfo {
  std::string name;
  std::string vendor;
  std::string url;
  std::string functionalities;
  std::string data_collection;
  std::string firmware_version;
  std::string vulnerability_notes;
  std::optional<std::string> buzzer_password;

  bool operator==(const DeviceInfo&) const = default;
};

/// Throws Error{InvalidUri}, Error{InvalidUtf8} or Error{InvalidPassword}.
void validate(const DeviceInfo& info);

/// URI record first, then text records for populated fields in the order
/// name, vendor, func, collect, fw, vuln, then the local-only password.
ndef::Message pack_device_info(const DeviceInfo& info);

/// Records with unrecognized keys are skipped.  Throws Error{MissingUrl} or
/// Error{DuplicateField}.
DeviceInfo unpack_device_info(const ndef::Message& message);

/// Drops the password; used for anything shown outside an NFC read.
DeviceInfo without_password(DeviceInfo info);

}  // namespace dial
