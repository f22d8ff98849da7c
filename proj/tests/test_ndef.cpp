/* SPDX-License-Identifier: Apache-2.0 */

#include <doctest.h>

#include <random>

#include "dial/error.hpp"
#include "dial/ndef.hpp"
#include "fixtures.hpp"

using namespace dial;
using ndef::Record;
using ndef::Tnf;

namespace {

Bytes bytes_of(std::string_view s) { return Bytes(s.begin(), s.end()); }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

Record random_record(std::mt19937_64& gen) {
  Record r;
  const int tnf = static_cast<int>(gen() % 7);  // Unchanged only appears in chunks
  r.tnf = static_cast<Tnf>(tnf == 6 ? 5 : tnf);
  auto blob = [&gen](std::size_t max) {
    Bytes b(gen() % (max + 1));
    for (auto& x : b) x = static_cast<std::uint8_t>(gen());
    return b;
  };
  if (r.tnf == Tnf::Empty) return r;
  if (r.tnf != Tnf::Unknown) {
    r.type = blob(12);
    if (r.type.empty()) r.type.push_back('t');
  }
  if (gen() % 2) r.id = blob(8);
  // Mix short and long records.
  r.payload = gen() % 10 == 0 ? blob(700) : blob(40);
  return r;
}

}  // namespace

TEST_CASE("short uri record matches a hand-assembled wire image") {
  const Record r = ndef::encode_uri("https://www.example.com");
  CHECK(r.payload == [] {
    Bytes b{0x02};
    const auto rest = bytes_of("example.com");
    b.insert(b.end(), rest.begin(), rest.end());
    return b;
  }());
  Bytes expected{0xD1, 0x01, 12, 'U', 0x02};
  const auto rest = bytes_of("example.com");
  expected.insert(expected.end(), rest.begin(), rest.end());
  const Bytes wire = ndef::encode_message({r});
  CHECK(wire == expected);
  CHECK(ndef::decode_message(wire) == ndef::Message{r});
}

TEST_CASE("uri prefix selection") {
  CHECK(ndef::encode_uri("urn:example").payload == [] {
    Bytes b{0x00};
    const auto rest = bytes_of("urn:example");
    b.insert(b.end(), rest.begin(), rest.end());
    return b;
  }());
  CHECK(ndef::encode_uri("http://www.a.org").payload[0] == 0x01);
  CHECK(ndef::encode_uri("https://www.a.org").payload[0] == 0x02);
  CHECK(ndef::encode_uri("http://a.org").payload[0] == 0x03);
  CHECK(ndef::encode_uri("https://a.org").payload[0] == 0x04);
  CHECK(ndef::encode_uri("ftp://a.org").payload[0] == 0x00);
  CHECK(code_of([] { ndef::encode_uri("not a uri"); }) == ErrorCode::InvalidUri);
  CHECK(code_of([] { ndef::encode_uri(""); }) == ErrorCode::InvalidUri);
}

TEST_CASE("decode accepts the full prefix table") {
  Record r;
  r.tnf = Tnf::WellKnown;
  r.type = bytes_of("U");
  r.payload = {0x06};
  const auto rest = bytes_of("user@example.com");
  r.payload.insert(r.payload.end(), rest.begin(), rest.end());
  CHECK(ndef::decode_uri(r) == "mailto:user@example.com");
  r.payload[0] = 0x23;
  CHECK(ndef::decode_uri(r) == "urn:nfc:user@example.com");
  r.payload[0] = 0x24;
  CHECK(code_of([&] { ndef::decode_uri(r); }) == ErrorCode::UnknownPrefixCode);
  CHECK(code_of([] { ndef::decode_uri(ndef::encode_text("x", "name")); }) ==
        ErrorCode::NotAUriRecord);
}

TEST_CASE("random uris round-trip") {
  const std::vector<std::string> schemes = {"http://www.", "https://www.", "http://", "https://",
                                            "ftp://", "urn:", "mailto:", "tel:+"};
  std::mt19937_64 gen(3);
  for (int i = 0; i < 100; ++i) {
    std::string uri = schemes[gen() % schemes.size()];
    const auto len = 1 + gen() % 30;
    for (std::size_t k = 0; k < len; ++k) uri.push_back("abcdefghij0123456789./-_"[gen() % 24]);
    REQUIRE(ndef::decode_uri(ndef::encode_uri(uri)) == uri);
  }
}

TEST_CASE("random record lists round-trip") {
  std::mt19937_64 gen(17);
  for (int i = 0; i < 1000; ++i) {
    ndef::Message m(1 + gen() % 6);
    for (auto& r : m) r = random_record(gen);
    const Bytes wire = ndef::encode_message(m);
    REQUIRE(ndef::decode_message(wire) == m);
    REQUIRE(ndef::encode_message(ndef::decode_message(wire)) == wire);
  }
}

TEST_CASE("wire header flags") {
  const ndef::Message m = {ndef::encode_text("a", "name"), ndef::encode_text("b", "vendor"),
                           ndef::encode_text("c", "fw")};
  const Bytes wire = ndef::encode_message(m);
  // First record: MB set, ME clear, SR and IL set, TNF 1.
  CHECK(wire[0] == (0x80 | 0x10 | 0x08 | 0x01));
  const auto m2 = ndef::decode_message(wire);
  CHECK(m2.size() == 3);
}

TEST_CASE("truncation and header errors") {
  const Bytes wire = ndef::encode_message({ndef::encode_uri("https://example.com/x")});
  for (std::size_t cut = 1; cut < wire.size(); ++cut) {
    REQUIRE(code_of([&] { ndef::decode_message(std::span(wire).first(cut)); }) ==
            ErrorCode::Truncated);
  }
  CHECK(code_of([] { ndef::decode_message({}); }) == ErrorCode::EmptyMessage);

  Bytes no_mb = wire;
  no_mb[0] &= 0x7F;
  CHECK(code_of([&] { ndef::decode_message(no_mb); }) == ErrorCode::BadHeader);

  Bytes chunked = wire;
  chunked[0] |= 0x20;
  CHECK(code_of([&] { ndef::decode_message(chunked); }) == ErrorCode::BadHeader);

  Bytes trailing = wire;
  trailing.push_back(0x00);
  CHECK(code_of([&] { ndef::decode_message(trailing); }) == ErrorCode::BadHeader);
}

TEST_CASE("payload limit") {
  Record r;
  r.tnf = Tnf::Media;
  r.type = bytes_of("a/b");
  r.payload.assign(ndef::kMaxPayload + 1, 0);
  CHECK(code_of([&] { ndef::encode_message({r}); }) == ErrorCode::PayloadTooLarge);
  r.payload.resize(ndef::kMaxPayload);
  CHECK(ndef::decode_message(ndef::encode_message({r})) == ndef::Message{r});
}

TEST_CASE("device info packing") {
  DeviceInfo minimal;
  minimal.url = "https://example.com/d";
  const auto m1 = pack_device_info(minimal);
  CHECK(m1.size() == 1);
  CHECK(ndef::is_uri_record(m1[0]));
  CHECK(unpack_device_info(m1) == minimal);

  DeviceInfo full = test::sample_info("lamp");
  full.vulnerability_notes = "telnet open on port 23";
  full.buzzer_password = "s3cret";
  const auto m2 = pack_device_info(full);
  CHECK(m2.size() == 8);
  CHECK(ndef::is_uri_record(m2.front()));
  CHECK(ndef::is_local_only(m2.back()));
  const auto back = unpack_device_info(ndef::decode_message(ndef::encode_message(m2)));
  CHECK(back == full);
  CHECK(without_password(back).buzzer_password == std::nullopt);
}

TEST_CASE("device info text is not normalized") {
  DeviceInfo info;
  info.url = "https://example.com/\xc3\xa9";
  info.name = "  Caf\xc3\xa9  \t";
  CHECK(unpack_device_info(pack_device_info(info)) == info);
}

TEST_CASE("device info errors") {
  CHECK(code_of([] { unpack_device_info({ndef::encode_text("x", "name")}); }) ==
        ErrorCode::MissingUrl);
  const ndef::Message dup = {ndef::encode_uri("https://a.org"), ndef::encode_text("x", "name"),
                             ndef::encode_text("y", "name")};
  CHECK(code_of([&] { unpack_device_info(dup); }) == ErrorCode::DuplicateField);
  const ndef::Message two_urls = {ndef::encode_uri("https://a.org"),
                                  ndef::encode_uri("https://b.org")};
  CHECK(code_of([&] { unpack_device_info(two_urls); }) == ErrorCode::DuplicateField);

  DeviceInfo bad = test::sample_info("x");
  bad.buzzer_password = "abc";
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::InvalidPassword);
  bad.buzzer_password = std::string(33, 'a');
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::InvalidPassword);
  bad.buzzer_password = "abcd";
  CHECK_NOTHROW(validate(bad));
  bad.name = "\xff";
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::InvalidUtf8);
}

TEST_CASE("utf8 validation") {
  CHECK(ndef::is_valid_utf8("plain"));
  CHECK(ndef::is_valid_utf8("\xe2\x82\xac"));
  CHECK_FALSE(ndef::is_valid_utf8("\xe2\x82"));
  CHECK_FALSE(ndef::is_valid_utf8("\xc0\xaf"));
  CHECK_FALSE(ndef::is_valid_utf8("\xed\xa0\x80"));
}
