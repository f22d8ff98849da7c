/* SPDX-License-Identifier: Apache-2.0 */

/** Tag firmware model.
 *
 * Both tag models beacon every 0.5 s on a grid anchored at t = 0.  A BLE-AC
 * tag plays a fixed three-tone sequence when it hears an activation frame
 * addressed to it, with its LED lit only while the buzzer sounds.  A
 * UWB-RAW tag has no buzzer; its LED is always on and its ranging radio
 * draws 75 mA continuously.  Battery draw is integrated exactly over each
 * tick, and a depleted tag goes silent. */

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dial/beacon.hpp"
#include "dial/geometry.hpp"
#include "dial/hex.hpp"

namespace dial {

inline constexpr double kBeaconInterval = 0.5;

struct Tone {
  double frequency_hz;
  double duration_s;
};

using BuzzerSequence = std::array<Tone, 3>;

const BuzzerSequence& buzzer_sequence();
double buzzer_duration();

struct CurrentProfile {
  double idle_mA = 1.0;
  double buzz_mA = 30.0;
  double uwb_mA = 0.0;

  bool operator==(const CurrentProfile&) const = default;
};

CurrentProfile default_profile(Model model);

struct BatteryState {
  double capacity_mAh = 6000.0;
  double drawn_mAh = 0.0;
  CurrentProfile profile;

  bool depleted() const { return drawn_mAh >= capacity_mAh; }
};

enum class LedMode { WhileBuzzing, AlwaysOn };

enum class FrameResult { Accepted, Ignored, PasswordRequired };

std::string_view result_name(FrameResult r);

struct Emission {
  enum class Kind { BeaconTx, ToneStart, BuzzStop, LedOn, LedOff, Depleted };

  Kind kind;
  double t;
  Frame frame{};           // BeaconTx
  int tone_index = -1;     // ToneStart
  double frequency_hz = 0; // ToneStart
};

struct TagConfig {
  TagId id;
  Model model = Model::BleAc;
  Vec2 position = Vec2::Zero();
  Bytes ndef_image;
  std::optional<std::string> password;
  std::optional<CurrentProfile> profile;
  double capacity_mAh = 6000.0;
  std::string label;
};

class Tag {
 public:
  explicit Tag(TagConfig config);

  /// Advances the firmware clock to `now` and returns everything that
  /// happened in (previous now, now], in time order.  Throws
  /// Error{InvalidArgument} if `now` goes backwards.
  std::vector<Emission> tick(double now);

  /// Handles a received frame at the tag's current clock.
  FrameResult on_frame(std::span<const std::uint8_t> frame,
                       std::optional<std::string_view> password = std::nullopt);

  /// Current at time `at`, judged against the buzzer state as of the last
  /// tick or activation.
  double current_draw(double at) const;

  const TagId& id() const { return config_.id; }
  Model model() const { return config_.model; }
  const Vec2& position() const { return config_.position; }
  const Bytes& ndef_image() const { return config_.ndef_image; }
  const std::string& label() const { return config_.label; }
  const std::optional<std::string>& password() const { return config_.password; }
  LedMode led_mode() const;
  bool has_buzzer() const { return config_.model == Model::BleAc; }

  /// Beacon this tag broadcasts (activation flag clear).
  Beacon beacon() const;

  double clock() const { return now_; }
  bool buzzing() const { return buzz_start_.has_value(); }
  std::optional<double> buzz_started_at() const { return buzz_start_; }
  bool led_on() const;
  const BatteryState& battery() const { return battery_; }

 private:
  double current_at_state(bool buzzing) const;
  std::optional<double> next_buzzer_event() const;
  // Integrates draw up to `until`; returns the depletion time if the
  // battery runs out first.
  std::optional<double> accrue(double until);

  TagConfig config_;
  BatteryState battery_;
  double now_ = 0.0;
  long next_beacon_ = 1;
  std::optional<double> buzz_start_;
  int next_buzz_step_ = 0;  // 0..2 tone starts, 3 = stop
  bool led_ = false;
  bool silent_ = false;
};

}  // namespace dial
