/* SPDX-License-Identifier: Apache-2.0 */

#include "dial/tag.hpp"

#include <algorithm>

#include "dial/error.hpp"

namespace dial {

namespace {

constexpr double kTimeEps = 1e-9;
constexpr double kSecondsPerHour = 3600.0;

}  // namespace

const BuzzerSequence& buzzer_sequence() {
  static const BuzzerSequence seq = {{{2000.0, 3.0}, {3000.0, 3.0}, {4000.0, 3.0}}};
  return seq;
}

double buzzer_duration() {
  double total = 0.0;
  for (const auto& t : buzzer_sequence()) total += t.duration_s;
  return total;
}

CurrentProfile default_profile(Model model) {
  if (model == Model::UwbRaw) return {0.0, 0.0, 75.0};
  return {1.0, 30.0, 0.0};
}

std::string_view result_name(FrameResult r) {
  switch (r) {
    case FrameResult::Accepted: return "accepted";
    case FrameResult::Ignored: return "ignored";
    case FrameResult::PasswordRequired: return "password_required";
  }
  return "ignored";
}

Tag::Tag(TagConfig config) : config_(std::move(config)) {
  battery_.capacity_mAh = config_.capacity_mAh;
  battery_.profile = config_.profile.value_or(default_profile(config_.model));
}

LedMode Tag::led_mode() const {
  return config_.model == Model::UwbRaw ? LedMode::AlwaysOn : LedMode::WhileBuzzing;
}

bool Tag::led_on() const {
  if (silent_) return false;
  return led_mode() == LedMode::AlwaysOn || buzzing();
}

Beacon Tag::beacon() const {
  Beacon b;
  b.model = config_.model;
  b.tag_id = config_.id;
  return b;
}

double Tag::current_at_state(bool buzzing) const {
  if (silent_) return 0.0;
  const auto& p = battery_.profile;
  return p.idle_mA + p.uwb_mA + (buzzing ? p.buzz_mA : 0.0);
}

double Tag::current_draw(double at) const {
  bool playing = false;
  if (buzz_start_) playing = at >= *buzz_start_ && at < *buzz_start_ + buzzer_duration();
  return current_at_state(playing);
}

std::optional<double> Tag::next_buzzer_event() const {
  if (!buzz_start_) return std::nullopt;
  if (next_buzz_step_ < 3) {
    double t = *buzz_start_;
    for (int i = 0; i < next_buzz_step_; ++i) t += buzzer_sequence()[i].duration_s;
    return t;
  }
  return *buzz_start_ + buzzer_duration();
}

std::optional<double> Tag::accrue(double until) {
  const double dt = until - now_;
  if (dt <= 0.0) return std::nullopt;
  const double current = current_at_state(buzzing());
  const double needed = current * dt / kSecondsPerHour;
  if (battery_.drawn_mAh + needed >= battery_.capacity_mAh && current > 0.0) {
    const double remaining = battery_.capacity_mAh - battery_.drawn_mAh;
    battery_.drawn_mAh = battery_.capacity_mAh;
    return now_ + remaining / current * kSecondsPerHour;
  }
  battery_.drawn_mAh += needed;
  return std::nullopt;
}

std::vector<Emission> Tag::tick(double now) {
  if (now + kTimeEps < now_) {
    throw Error(ErrorCode::InvalidArgument, "tag clock cannot go backwards");
  }
  std::vector<Emission> out;
  if (silent_) {
    now_ = std::max(now_, now);
    return out;
  }

  auto deplete = [&](double at) {
    out.push_back({Emission::Kind::Depleted, at});
    silent_ = true;
    buzz_start_.reset();
    next_buzz_step_ = 0;
    now_ = std::max(now, at);
  };

  for (;;) {
    const double beacon_t = static_cast<double>(next_beacon_) * kBeaconInterval;
    const auto buzz_t = next_buzzer_event();
    const bool buzzer_first = buzz_t && *buzz_t <= beacon_t;
    const double next_t = buzzer_first ? *buzz_t : beacon_t;
    if (next_t > now + kTimeEps) break;

    const double at = std::max(next_t, now_);
    if (auto dep = accrue(at)) {
      deplete(*dep);
      return out;
    }
    now_ = at;

    if (!buzzer_first) {
      Emission e{Emission::Kind::BeaconTx, beacon_t};
      e.frame = encode_beacon(beacon());
      out.push_back(e);
      ++next_beacon_;
      continue;
    }
    if (next_buzz_step_ < 3) {
      if (next_buzz_step_ == 0 && led_mode() == LedMode::WhileBuzzing) {
        out.push_back({Emission::Kind::LedOn, next_t});
      }
      Emission e{Emission::Kind::ToneStart, next_t};
      e.tone_index = next_buzz_step_;
      e.frequency_hz = buzzer_sequence()[next_buzz_step_].frequency_hz;
      out.push_back(e);
      ++next_buzz_step_;
    } else {
      buzz_start_.reset();
      next_buzz_step_ = 0;
      out.push_back({Emission::Kind::BuzzStop, next_t});
      if (led_mode() == LedMode::WhileBuzzing) out.push_back({Emission::Kind::LedOff, next_t});
    }
  }

  if (auto dep = accrue(now)) {
    deplete(*dep);
    return out;
  }
  now_ = std::max(now_, now);
  return out;
}

FrameResult Tag::on_frame(std::span<const std::uint8_t> frame,
                          std::optional<std::string_view> password) {
  if (silent_ || !is_dial_frame(frame)) return FrameResult::Ignored;
  const Beacon b = decode_beacon(frame);
  if (!is_activation_for(b, config_.id) || !has_buzzer()) return FrameResult::Ignored;
  if (config_.password && (!password || *password != *config_.password)) {
    return FrameResult::PasswordRequired;
  }
  if (!buzz_start_) {
    buzz_start_ = now_;
    next_buzz_step_ = 0;
  }
  return FrameResult::Accepted;
}

}  // namespace dial
