/* SPDX-License-Identifier: Apache-2.0 */

#include <doctest.h>

#include <set>

#include "dial/tag.hpp"
#include "fixtures.hpp"

using namespace dial;

namespace {

Tag ble(const std::string& hex = "00000000000a", std::optional<std::string> pw = std::nullopt) {
  return Tag(test::make_tag(hex, Model::BleAc, Vec2(1, 1), std::move(pw)));
}

std::size_t count(const std::vector<Emission>& v, Emission::Kind k) {
  std::size_t n = 0;
  for (const auto& e : v) n += e.kind == k;
  return n;
}

}  // namespace

TEST_CASE("buzzer sequence") {
  const auto& seq = buzzer_sequence();
  CHECK(seq[0].frequency_hz == 2000);
  CHECK(seq[1].frequency_hz == 3000);
  CHECK(seq[2].frequency_hz == 4000);
  std::set<double> freqs;
  for (const auto& t : seq) {
    CHECK(t.duration_s == 3.0);
    freqs.insert(t.frequency_hz);
  }
  CHECK(freqs.size() == 3);
  CHECK(buzzer_duration() == 9.0);
}

TEST_CASE("beacons every half second") {
  Tag t = ble();
  const auto out = t.tick(2.0);
  CHECK(count(out, Emission::Kind::BeaconTx) == 4);
  CHECK(out.front().t == 0.5);
  CHECK(out.back().t == 2.0);
  CHECK(decode_beacon(out.front().frame) == t.beacon());

  Tag u(test::make_tag("00000000000b", Model::UwbRaw, Vec2(0, 0)));
  CHECK(count(u.tick(2.0), Emission::Kind::BeaconTx) == 4);

  // Uneven ticks land on the same grid.
  Tag s = ble();
  std::size_t n = 0;
  for (double now = 0.07; now <= 10.0; now += 0.37) n += count(s.tick(now), Emission::Kind::BeaconTx);
  CHECK(n == static_cast<std::size_t>(s.clock() / 0.5));
}

TEST_CASE("zero elapsed time") {
  Tag t = ble();
  t.tick(1.0);
  const double drawn = t.battery().drawn_mAh;
  CHECK(t.tick(1.0).empty());
  CHECK(t.battery().drawn_mAh == drawn);
}

TEST_CASE("activation plays three tones then stops") {
  Tag t = ble();
  t.tick(1.0);
  Beacon b = t.beacon();
  CHECK(t.on_frame(make_activation_frame(b)) == FrameResult::Accepted);
  CHECK(t.buzzing());
  CHECK(t.led_on());

  std::vector<Emission> all;
  for (double now = 1.1; now < 12.0; now += 0.1) {
    for (auto& e : t.tick(now)) all.push_back(e);
    if (now < 10.0 - 1e-9) {
      REQUIRE(t.buzzing());
      REQUIRE(t.led_on());
    }
  }
  std::vector<double> tones;
  for (const auto& e : all) {
    if (e.kind == Emission::Kind::ToneStart) tones.push_back(e.t);
  }
  REQUIRE(tones.size() == 3);
  CHECK(tones[0] == doctest::Approx(1.0));
  CHECK(tones[1] == doctest::Approx(4.0));
  CHECK(tones[2] == doctest::Approx(7.0));
  CHECK_FALSE(t.buzzing());
  CHECK_FALSE(t.led_on());
  CHECK(count(all, Emission::Kind::BuzzStop) == 1);
}

TEST_CASE("buzzer returns to idle exactly nine seconds after start") {
  Tag t = ble();
  t.tick(2.0);
  t.on_frame(make_activation_frame(t.beacon()));
  t.tick(10.9);
  CHECK(t.buzzing());
  const auto out = t.tick(11.0);
  CHECK(count(out, Emission::Kind::BuzzStop) == 1);
  CHECK(count(out, Emission::Kind::LedOff) == 1);
  CHECK_FALSE(t.buzzing());
}

TEST_CASE("frames that do not start the buzzer") {
  Tag t = ble("00000000000a");
  Tag other = ble("00000000000b");
  CHECK(t.on_frame(make_activation_frame(other.beacon())) == FrameResult::Ignored);
  CHECK(t.on_frame(encode_beacon(t.beacon())) == FrameResult::Ignored);  // plain relay
  Frame bad = make_activation_frame(t.beacon());
  bad[3] ^= 0x40;
  CHECK(t.on_frame(bad) == FrameResult::Ignored);
  CHECK(t.on_frame(std::vector<std::uint8_t>{1, 2, 3}) == FrameResult::Ignored);
  CHECK_FALSE(t.buzzing());

  Tag uwb(test::make_tag("00000000000c", Model::UwbRaw, Vec2(0, 0)));
  CHECK(uwb.on_frame(make_activation_frame(uwb.beacon())) == FrameResult::Ignored);
  CHECK(uwb.led_mode() == LedMode::AlwaysOn);
  CHECK(uwb.led_on());
  CHECK(t.led_mode() == LedMode::WhileBuzzing);
}

TEST_CASE("password mode") {
  Tag t = ble("00000000000a", "hunter22");
  const Frame a = make_activation_frame(t.beacon());
  CHECK(t.on_frame(a) == FrameResult::PasswordRequired);
  CHECK(t.on_frame(a, "hunter2") == FrameResult::PasswordRequired);
  CHECK_FALSE(t.buzzing());
  CHECK(t.on_frame(a, "hunter22") == FrameResult::Accepted);
  CHECK(t.buzzing());
}

TEST_CASE("current draw") {
  Tag idle = ble();
  CHECK(idle.current_draw(0.0) == 1.0);
  Tag uwb(test::make_tag("00000000000c", Model::UwbRaw, Vec2(0, 0)));
  CHECK(uwb.current_draw(0.0) == 75.0);

  Tag t = ble();
  t.tick(1.0);
  t.on_frame(make_activation_frame(t.beacon()));
  CHECK(t.current_draw(1.5) == 31.0);
  CHECK(t.current_draw(10.5) == 1.0);
}

TEST_CASE("battery accrual and depletion") {
  Tag t = ble();
  t.tick(3600.0);
  CHECK(t.battery().drawn_mAh == doctest::Approx(1.0));

  // 2 s buzzing at 31 mA plus 2 s idle at 1 mA.
  Tag b = ble();
  b.on_frame(make_activation_frame(b.beacon()));
  b.tick(2.0);
  CHECK(b.battery().drawn_mAh == doctest::Approx(31.0 * 2.0 / 3600.0));

  TagConfig cfg = test::make_tag("00000000000d", Model::BleAc, Vec2(0, 0));
  cfg.capacity_mAh = 1.0 / 1000.0;  // 3.6 s at 1 mA
  Tag small(cfg);
  const auto out = small.tick(10.0);
  REQUIRE(count(out, Emission::Kind::Depleted) == 1);
  CHECK(out.back().kind == Emission::Kind::Depleted);
  CHECK(out.back().t == doctest::Approx(3.6));
  CHECK(count(out, Emission::Kind::BeaconTx) == 7);
  CHECK(small.battery().depleted());
  CHECK(small.tick(20.0).empty());
  CHECK(small.current_draw(20.0) == 0.0);
  CHECK(small.on_frame(make_activation_frame(small.beacon())) == FrameResult::Ignored);
}

TEST_CASE("beacon bytes ignore ndef contents") {
  TagConfig a = test::make_tag("00000000000e", Model::BleAc, Vec2(0, 0));
  TagConfig b = a;
  DeviceInfo other = test::sample_info("something else");
  other.buzzer_password = "abcdef";
  b.ndef_image = ndef::encode_message(pack_device_info(other));
  CHECK(encode_beacon(Tag(a).beacon()) == encode_beacon(Tag(b).beacon()));
}
