/* SPDX-License-Identifier: Apache-2.0 */

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <thread>

#include "dial/session.hpp"
#include "fixtures.hpp"
#include "schema_check.hpp"

using namespace dial;
using nlohmann::json;

namespace {

const json& client_schema() {
  static const json s = test::load_schema("client.schema.json");
  return s;
}

const json& server_schema() {
  static const json s = test::load_schema("server.schema.json");
  return s;
}

/// Sends a message and checks both sides of the exchange against the schemas.
Reply send(Session& s, const json& msg) {
  Reply r = s.handle(msg);
  REQUIRE(test::conforms(json::parse(r.response.dump()), server_schema()));
  for (const auto& p : r.pushes) REQUIRE(test::conforms(json::parse(p.dump()), server_schema()));
  return r;
}

Reply send(Session& s, const char* text) {
  const json msg = json::parse(text);
  REQUIRE(test::conforms(msg, client_schema()));
  return send(s, msg);
}

std::string type_of(const nlohmann::ordered_json& j) { return j["type"].get<std::string>(); }

std::set<std::string> tag_ids(const Reply& r) {
  std::set<std::string> ids;
  for (const auto& t : r.response["tags"]) ids.insert(t["tag_id"].get<std::string>());
  return ids;
}

Session loaded(const std::string& id = "s") {
  Session s(id);
  send(s, R"({"type":"hello"})");
  send(s, R"({"type":"load_scenario","name":"fig6_apartment"})");
  return s;
}

}  // namespace

TEST_CASE("schemas cover every message type") {
  std::set<std::string> client, server;
  for (const auto& alt : client_schema()["oneOf"]) client.insert(alt["properties"]["type"]["const"]);
  for (const auto& alt : server_schema()["oneOf"]) server.insert(alt["properties"]["type"]["const"]);
  CHECK(client == std::set<std::string>(client_message_types().begin(),
                                        client_message_types().end()));
  CHECK(server == std::set<std::string>(server_message_types().begin(),
                                        server_message_types().end()));
  CHECK(client_schema()["schema_version"] == kSchemaVersion);
}

TEST_CASE("hello and world state") {
  Session s("abc");
  const Reply r = send(s, R"({"type":"hello","id":7})");
  CHECK(type_of(r.response) == "world_state");
  CHECK(r.response["session_id"] == "abc");
  CHECK(r.response["loaded"] == false);
  CHECK(r.response["id"] == 7);
  const Reply err = send(s, R"({"type":"list_tags"})");
  CHECK(err.response["code"] == "no_scenario");

  const Reply l = send(s, R"({"type":"load_scenario","name":"fig6_apartment","seed":4})");
  CHECK(l.response["loaded"] == true);
  CHECK(l.response["bounds"][0] == 10.0);
  CHECK(l.response["revealed"].empty());
  CHECK(s.world()->scenario().seed == 4);
}

TEST_CASE("every message gets exactly one response") {
  Session s = loaded();
  const std::vector<std::string> msgs = {
      R"({"type":"nope"})", R"([1,2])", R"({"type":"move"})", R"({"type":"move","dx":"1","dy":0})",
      R"({"type":"step","dt":1,"extra":true})", R"({"type":"radar","tag_id":"zz"})",
      R"({"type":"load_scenario"})", R"({"type":"buzz","tag_id":"ffffffffffff"})",
      R"({"type":"step","dt":-1})"};
  for (const auto& m : msgs) {
    const Reply r = send(s, json::parse(m));
    CHECK(type_of(r.response) == "error");
  }
  CHECK(send(s, json::parse(R"({"type":"nope"})")).response["code"] == "unknown_type");
  CHECK(send(s, json::parse(R"({"type":"move"})")).response["code"] == "bad_request");
  CHECK(send(s, json::parse(R"({"type":"buzz","tag_id":"ffffffffffff"})")).response["code"] ==
        "unknown_tag");
}

TEST_CASE("discovery and tag list") {
  Session s = loaded();
  send(s, R"({"type":"step","dt":1.0})");
  const Reply r = send(s, R"({"type":"list_tags"})");
  CHECK(type_of(r.response) == "tag_list");
  REQUIRE(r.response["tags"].size() == 3);
  CHECK(r.response["tags"][0]["action"] == "radar");
  CHECK(r.response["tags"][1]["action"] == "buzz");
  const std::string dump = r.response.dump();
  CHECK(dump.find("password") == std::string::npos);
}

TEST_CASE("state changes stream as event pushes") {
  Session s = loaded();
  const std::size_t before = s.world()->event_log().size();
  const Reply r = send(s, R"({"type":"step","dt":1.0})");
  std::size_t events = 0;
  for (const auto& p : r.pushes) events += type_of(p) == "event";
  CHECK(events == s.world()->event_log().size() - before);
  CHECK(r.pushes.back()["event"]["kind"] == "ClockAdvance");
  const Reply m = send(s, R"({"type":"move","dx":0.5,"dy":0})");
  REQUIRE(m.pushes.size() == 1);
  CHECK(m.pushes[0]["event"]["kind"] == "ReaderMove");
}

TEST_CASE("buzzing pushes follow the inverse-square level") {
  Session s = loaded();
  send(s, R"({"type":"step","dt":1.0})");
  const Reply b = send(s, R"({"type":"buzz","tag_id":"0a1b2c3d4e02"})");
  CHECK(type_of(b.response) == "buzzing");
  CHECK(b.response["result"] == "accepted");
  CHECK(b.response["tones_hz"].size() == 3);

  const Vec2 tag = s.world()->find_tag(test::id_of("0a1b2c3d4e02"))->position();
  std::vector<double> levels;
  for (int i = 0; i < 110; ++i) {
    const Reply r = send(s, R"({"type":"step","dt":0.1})");
    const Vec2 me = s.world()->reader(0).position();
    for (const auto& p : r.pushes) {
      if (type_of(p) != "buzzing") continue;
      const double d = (me - tag).norm();
      CHECK(p["level"].get<double>() == doctest::Approx(1.0 / (1.0 + d * d)));
      levels.push_back(p["level"]);
    }
  }
  CHECK(levels.size() >= 89);
  CHECK(levels.size() <= 90);  // 9 s at 0.1 s resolution
}

TEST_CASE("level falls as the reader walks away") {
  Session s = loaded();
  send(s, R"({"type":"step","dt":1.0})");
  send(s, R"({"type":"move","dx":2.0,"dy":0.5})");
  send(s, R"({"type":"buzz","tag_id":"0a1b2c3d4e02"})");
  double last = 2.0;
  for (int i = 0; i < 6; ++i) {
    const Reply r = send(s, R"({"type":"step","dt":0.1})");
    for (const auto& p : r.pushes) {
      if (type_of(p) == "buzzing") {
        CHECK(p["level"].get<double>() < last);
        last = p["level"];
      }
    }
    send(s, R"({"type":"move","dx":-0.5,"dy":0})");
  }
}

TEST_CASE("buzz and radar type gates") {
  Session s = loaded();
  send(s, R"({"type":"step","dt":1.0})");
  CHECK(send(s, R"({"type":"buzz","tag_id":"0a1b2c3d4e01"})").response["code"] == "no_buzzer");
  CHECK(send(s, R"({"type":"radar","tag_id":"0a1b2c3d4e02"})").response["code"] == "not_uwb");
  const Reply far = send(s, R"({"type":"radar","tag_id":"0a1b2c3d4e01"})");
  CHECK(type_of(far.response) == "distance");
  CHECK(far.response["out_of_range"] == true);
}

TEST_CASE("nfc reads are gated by distance") {
  Session s = loaded();
  const Reply miss = send(s, R"({"type":"nfc_read"})");
  CHECK(miss.response["code"] == "nothing_in_range");

  // Walk onto the first BLE tag and read it.
  const Vec2 tag = s.world()->find_tag(test::id_of("0a1b2c3d4e02"))->position();
  const Vec2 d = tag - s.world()->reader(0).position() + Vec2(0.03, 0);
  const Reply w = send(s, json{{"type", "move"}, {"dx", d.x()}, {"dy", d.y()}});
  CHECK(w.response["nfc_available"] == true);
  CHECK(w.response["revealed"].size() == 1);
  const Reply hit = send(s, R"({"type":"nfc_read"})");
  CHECK(type_of(hit.response) == "ndef_result");
  CHECK(hit.response["device_info"]["url"] == "https://www.example.com/devices/speaker-s1");
  CHECK(hit.response["inventory_size"] == 1);

  const auto path = std::filesystem::temp_directory_path() / "dial_session_inv.json";
  const Reply saved = send(s, json{{"type", "save_inventory"}, {"path", path.string()}});
  CHECK(type_of(saved.response) == "inventory_saved");
  CHECK(load_inventory(path).size() == 1);
  std::filesystem::remove(path);
}

TEST_CASE("two sessions see the same tags without pairing") {
  Session a = loaded("a");
  Session b = loaded("b");
  send(a, R"({"type":"step","dt":1.0})");
  send(b, R"({"type":"move","dx":1.5,"dy":2.0})");
  send(b, R"({"type":"step","dt":1.0})");
  const auto ia = tag_ids(send(a, R"({"type":"list_tags"})"));
  const auto ib = tag_ids(send(b, R"({"type":"list_tags"})"));
  CHECK(ia.size() == 3);
  CHECK(ia == ib);
}

TEST_CASE("sessions are isolated") {
  SessionManager m;
  const std::string a = m.create();
  const std::string b = m.create();
  CHECK(a != b);
  CHECK(a.size() == 32);
  m.handle(a, json::parse(R"({"type":"load_scenario","name":"fig6_apartment"})"));
  m.handle(b, json::parse(R"({"type":"load_scenario","name":"fig6_apartment"})"));
  const std::string before = replay(*m.trace(b)).event_log_text();
  m.handle(a, json::parse(R"({"type":"step","dt":3.0})"));
  m.handle(a, json::parse(R"({"type":"move","dx":2.0,"dy":2.0})"));
  CHECK(replay(*m.trace(b)).event_log_text() == before);
  CHECK(m.trace(b)->commands.empty());
  CHECK(m.handle("missing", json::parse(R"({"type":"hello","id":"x"})")).response["code"] ==
        "bad_session");

  // Concurrent sessions do not interfere.
  std::vector<std::thread> threads;
  for (const auto& id : {a, b}) {
    threads.emplace_back([&m, id] {
      for (int i = 0; i < 50; ++i) m.handle(id, json::parse(R"({"type":"step","dt":0.2})"));
    });
  }
  for (auto& t : threads) t.join();
  CHECK(m.trace(a)->commands.size() == 52);
  CHECK(m.trace(b)->commands.size() == 50);
}

TEST_CASE("session traces replay to the same log") {
  Session s = loaded();
  send(s, R"({"type":"step","dt":1.0})");
  send(s, R"({"type":"buzz","tag_id":"0a1b2c3d4e03"})");
  send(s, R"({"type":"move","dx":1.0,"dy":3.0})");
  send(s, R"({"type":"radar","tag_id":"0a1b2c3d4e01"})");
  send(s, R"({"type":"nfc_read"})");
  send(s, R"({"type":"step","dt":2.3})");
  const Reply t = send(s, R"({"type":"get_trace"})");
  const Trace trace = trace_from_json(json::parse(t.response["trace"].dump()));
  CHECK(replay(trace).event_log_text() == s.world()->event_log_text());
}

TEST_CASE("auto tick") {
  Session s = loaded();
  CHECK_FALSE(s.auto_tick(0.1).has_value());
  send(s, R"({"type":"auto_tick","enabled":true})");
  for (int i = 0; i < 10; ++i) REQUIRE(s.auto_tick(0.1).has_value());
  CHECK(s.world()->clock() == doctest::Approx(1.0));
  send(s, R"({"type":"auto_tick","enabled":false})");
  CHECK_FALSE(s.auto_tick(0.1).has_value());
}
