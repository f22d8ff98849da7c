/* SPDX-License-Identifier: Apache-2.0 */

#include "dial/ndef.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "dial/error.hpp"

namespace dial::ndef {

namespace {

constexpr std::uint8_t kMB = 0x80;
constexpr std::uint8_t kME = 0x40;
constexpr std::uint8_t kCF = 0x20;
constexpr std::uint8_t kSR = 0x10;
constexpr std::uint8_t kIL = 0x08;
constexpr std::uint8_t kTnfMask = 0x07;

// NFC Forum URI record abbreviations.  Only codes 0x00-0x04 are emitted.
constexpr std::array<std::string_view, 0x24> kUriPrefixes = {
    "",
    "http://www.",
    "https://www.",
    "http://",
    "https://",
    "tel:",
    "mailto:",
    "ftp://anonymous:anonymous@",
    "ftp://ftp.",
    "ftps://",
    "sftp://",
    "smb://",
    "nfs://",
    "ftp://",
    "dav://",
    "news:",
    "telnet://",
    "imap:",
    "rtsp://",
    "urn:",
    "pop:",
    "sip:",
    "sips:",
    "tftp:",
    "btspp://",
    "btl2cap://",
    "btgoep://",
    "tcpobex://",
    "irdaobex://",
    "file://",
    "urn:epc:id:",
    "urn:epc:tag:",
    "urn:epc:pat:",
    "urn:epc:raw:",
    "urn:epc:",
    "urn:nfc:",
};
constexpr std::uint8_t kMaxEmittedPrefix = 0x04;

constexpr std::string_view kUriType = "U";
constexpr std::string_view kTextType = "T";
constexpr std::string_view kTextLang = "en";

Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

bool bytes_equal(const Bytes& b, std::string_view s) {
  return b.size() == s.size() && std::equal(b.begin(), b.end(), s.begin());
}

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool done() const { return pos_ == bytes_.size(); }

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
  }

  Bytes take(std::size_t n) {
    need(n);
    Bytes out(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
              bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::Truncated, "need " + std::to_string(n) + " bytes at offset " +
                                            std::to_string(pos_));
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Bytes encode_message(const Message& records) {
  if (records.empty()) throw Error(ErrorCode::EmptyMessage, "no records");
  Bytes out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Record& r = records[i];
    const auto tnf = static_cast<std::uint8_t>(r.tnf);
    if (tnf > kTnfMask) throw Error(ErrorCode::BadHeader, "tnf out of range");
    if (r.type.size() > 255 || (r.id && r.id->size() > 255)) {
      throw Error(ErrorCode::PayloadTooLarge, "type or id longer than 255 bytes");
    }
    if (r.payload.size() > kMaxPayload) {
      throw Error(ErrorCode::PayloadTooLarge,
                  "payload of " + std::to_string(r.payload.size()) + " bytes");
    }
    if (r.tnf == Tnf::Empty && (!r.type.empty() || r.id || !r.payload.empty())) {
      throw Error(ErrorCode::BadHeader, "empty record with content");
    }
    const bool short_record = r.payload.size() <= 255;
    std::uint8_t header = tnf;
    if (i == 0) header |= kMB;
    if (i + 1 == records.size()) header |= kME;
    if (short_record) header |= kSR;
    if (r.id) header |= kIL;
    out.push_back(header);
    out.push_back(static_cast<std::uint8_t>(r.type.size()));
    if (short_record) {
      out.push_back(static_cast<std::uint8_t>(r.payload.size()));
    } else {
      const auto n = static_cast<std::uint32_t>(r.payload.size());
      for (int shift = 24; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(n >> shift));
      }
    }
    if (r.id) out.push_back(static_cast<std::uint8_t>(r.id->size()));
    out.insert(out.end(), r.type.begin(), r.type.end());
    if (r.id) out.insert(out.end(), r.id->begin(), r.id->end());
    out.insert(out.end(), r.payload.begin(), r.payload.end());
  }
  return out;
}

Message decode_message(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw Error(ErrorCode::EmptyMessage, "no bytes");
  Cursor in(bytes);
  Message records;
  bool ended = false;
  while (!ended) {
    if (in.done()) throw Error(ErrorCode::Truncated, "message ended without ME");
    const std::uint8_t header = in.u8();
    const bool first = records.empty();
    if (((header & kMB) != 0) != first) {
      throw Error(ErrorCode::BadHeader, "MB flag on record " + std::to_string(records.size()));
    }
    if (header & kCF) throw Error(ErrorCode::BadHeader, "chunked records are not supported");
    ended = (header & kME) != 0;

    Record r;
    r.tnf = static_cast<Tnf>(header & kTnfMask);
    const std::size_t type_len = in.u8();
    const std::size_t payload_len = (header & kSR) ? in.u8() : in.u32();
    const std::optional<std::size_t> id_len =
        (header & kIL) ? std::optional<std::size_t>(in.u8()) : std::nullopt;
    r.type = in.take(type_len);
    if (id_len) r.id = in.take(*id_len);
    r.payload = in.take(payload_len);
    if (r.tnf == Tnf::Empty && (!r.type.empty() || r.id || !r.payload.empty())) {
      throw Error(ErrorCode::BadHeader, "empty record with content");
    }
    records.push_back(std::move(r));
  }
  if (!in.done()) throw Error(ErrorCode::BadHeader, "bytes after the ME record");
  return records;
}

bool is_absolute_uri(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  if (!std::isalpha(static_cast<unsigned char>(text[0]))) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (!std::isalnum(c) && c != '+' && c != '-' && c != '.') return false;
  }
  return true;
}

Record encode_uri(std::string_view uri) {
  if (uri.empty() || !is_absolute_uri(uri) || !is_valid_utf8(uri)) {
    throw Error(ErrorCode::InvalidUri, std::string(uri));
  }
  std::uint8_t code = 0;
  for (std::uint8_t c = 1; c <= kMaxEmittedPrefix; ++c) {
    const auto prefix = kUriPrefixes[c];
    if (uri.starts_with(prefix) && prefix.size() > kUriPrefixes[code].size()) code = c;
  }
  Record r;
  r.tnf = Tnf::WellKnown;
  r.type = to_bytes(kUriType);
  r.payload.push_back(code);
  const auto rest = uri.substr(kUriPrefixes[code].size());
  r.payload.insert(r.payload.end(), rest.begin(), rest.end());
  return r;
}

bool is_uri_record(const Record& record) {
  return record.tnf == Tnf::WellKnown && bytes_equal(record.type, kUriType);
}

std::string decode_uri(const Record& record) {
  if (!is_uri_record(record) || record.payload.empty()) {
    throw Error(ErrorCode::NotAUriRecord, "record is not a well-known U record");
  }
  const std::uint8_t code = record.payload[0];
  if (code >= kUriPrefixes.size()) {
    throw Error(ErrorCode::UnknownPrefixCode, "prefix code " + std::to_string(code));
  }
  std::string uri(kUriPrefixes[code]);
  uri.append(record.payload.begin() + 1, record.payload.end());
  return uri;
}

Record encode_text(std::string_view text, std::string_view key) {
  Record r;
  r.tnf = Tnf::WellKnown;
  r.type = to_bytes(kTextType);
  r.id = to_bytes(key);
  r.payload.push_back(static_cast<std::uint8_t>(kTextLang.size()));
  r.payload.insert(r.payload.end(), kTextLang.begin(), kTextLang.end());
  r.payload.insert(r.payload.end(), text.begin(), text.end());
  return r;
}

std::optional<std::string> decode_text(const Record& record) {
  if (record.tnf != Tnf::WellKnown || !bytes_equal(record.type, kTextType)) return std::nullopt;
  if (record.payload.empty()) return std::nullopt;
  const std::uint8_t status = record.payload[0];
  if (status & 0x80) return std::nullopt;  // UTF-16
  const std::size_t lang_len = status & 0x3F;
  if (record.payload.size() < 1 + lang_len) return std::nullopt;
  return std::string(record.payload.begin() + 1 + static_cast<std::ptrdiff_t>(lang_len),
                     record.payload.end());
}

bool is_local_only(const Record& record) {
  return record.tnf == Tnf::External && bytes_equal(record.type, kLocalRecordType);
}

bool is_valid_utf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= text.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    static constexpr std::uint32_t kMinForLength[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLength[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

}  // namespace dial::ndef

namespace dial {

namespace {

struct FieldKey {
  std::string_view key;
  std::string DeviceInfo::*field;
};

constexpr std::string_view kPasswordKey = "pw";

const std::array<FieldKey, 6>& text_fields() {
  static const std::array<FieldKey, 6> fields = {{
      {"name", &DeviceInfo::name},
      {"vendor", &DeviceInfo::vendor},
      {"func", &DeviceInfo::functionalities},
      {"collect", &DeviceInfo::data_collection},
      {"fw", &DeviceInfo::firmware_version},
      {"vuln", &DeviceInfo::vulnerability_notes},
  }};
  return fields;
}

std::string id_text(const ndef::Record& r) {
  return r.id ? std::string(r.id->begin(), r.id->end()) : std::string();
}

}  // namespace

void validate(const DeviceInfo& info) {
  if (!ndef::is_absolute_uri(info.url)) throw Error(ErrorCode::InvalidUri, info.url);
  for (const auto& f : text_fields()) {
    if (!ndef::is_valid_utf8(info.*(f.field))) {
      throw Error(ErrorCode::InvalidUtf8, std::string(f.key));
    }
  }
  if (!ndef::is_valid_utf8(info.url)) throw Error(ErrorCode::InvalidUtf8, "url");
  if (info.buzzer_password) {
    const auto& pw = *info.buzzer_password;
    if (!ndef::is_valid_utf8(pw)) throw Error(ErrorCode::InvalidUtf8, "pw");
    if (pw.size() < 4 || pw.size() > 32) {
      throw Error(ErrorCode::InvalidPassword,
                  "password must be 4-32 bytes, got " + std::to_string(pw.size()));
    }
  }
}

ndef::Message pack_device_info(const DeviceInfo& info) {
  validate(info);
  ndef::Message msg;
  msg.push_back(ndef::encode_uri(info.url));
  for (const auto& f : text_fields()) {
    const std::string& value = info.*(f.field);
    if (!value.empty()) msg.push_back(ndef::encode_text(value, f.key));
  }
  if (info.buzzer_password) {
    ndef::Record pw;
    pw.tnf = ndef::Tnf::External;
    pw.type = Bytes(ndef::kLocalRecordType.begin(), ndef::kLocalRecordType.end());
    pw.id = Bytes(kPasswordKey.begin(), kPasswordKey.end());
    pw.payload = Bytes(info.buzzer_password->begin(), info.buzzer_password->end());
    msg.push_back(std::move(pw));
  }
  return msg;
}

DeviceInfo unpack_device_info(const ndef::Message& message) {
  DeviceInfo info;
  bool have_url = false;
  std::vector<std::string> seen;
  auto mark = [&seen](const std::string& key) {
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw Error(ErrorCode::DuplicateField, key);
    }
    seen.push_back(key);
  };

  for (const auto& r : message) {
    if (ndef::is_uri_record(r)) {
      mark("url");
      info.url = ndef::decode_uri(r);
      have_url = true;
      continue;
    }
    if (ndef::is_local_only(r)) {
      if (id_text(r) != kPasswordKey) continue;
      mark(std::string(kPasswordKey));
      info.buzzer_password = std::string(r.payload.begin(), r.payload.end());
      continue;
    }
    const auto text = ndef::decode_text(r);
    if (!text) continue;
    const std::string key = id_text(r);
    for (const auto& f : text_fields()) {
      if (key == f.key) {
        mark(key);
        info.*(f.field) = *text;
      }
    }
  }
  if (!have_url) throw Error(ErrorCode::MissingUrl, "no URI record in message");
  return info;
}

DeviceInfo without_password(DeviceInfo info) {
  info.buzzer_password.reset();
  return info;
}

}  // namespace dial
