/* SPDX-License-Identifier: Apache-2.0 */

#include "dial/radio.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dial/error.hpp"

namespace dial {

void validate(const PropagationParams& p) {
  if (!(p.path_loss_exponent > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "path_loss_exponent must be > 0");
  }
  if (!(p.rssi_noise_sigma >= 0.0) || !(p.uwb_sigma >= 0.0)) {
    throw Error(ErrorCode::InvalidParams, "sigmas must be >= 0");
  }
  if (!(p.uwb_max_range > 0.0)) throw Error(ErrorCode::InvalidParams, "uwb_max_range must be > 0");
  if (!(p.wall_penalty >= 0.0)) throw Error(ErrorCode::InvalidParams, "wall_penalty must be >= 0");
  if (p.nfc_range != kNfcRange) throw Error(ErrorCode::InvalidParams, "nfc_range is fixed at 0.10");
}

double discovery_radius(const PropagationParams& p) {
  return std::pow(10.0, (p.tx_power_1m - p.reader_sensitivity) / (10.0 * p.path_loss_exponent));
}

double rssi_at(const PropagationParams& p, double distance, int walls_crossed, Rng& rng) {
  const double d = std::max(distance, kMinDistance);
  const double mean = p.tx_power_1m - 10.0 * p.path_loss_exponent * std::log10(d) -
                      walls_crossed * p.wall_penalty;
  return rng.normal(mean, p.rssi_noise_sigma);
}

double distance_from_rssi(const PropagationParams& p, double rssi) {
  return std::pow(10.0, (p.tx_power_1m - rssi) / (10.0 * p.path_loss_exponent));
}

std::optional<double> ble_deliver(const PropagationParams& p, const Vec2& src, const Vec2& dst,
                                  std::span<const Segment> walls, Rng& rng,
                                  int extra_crossings) {
  const int crossings = count_crossings(src, dst, walls) + extra_crossings;
  const double rssi = rssi_at(p, (dst - src).norm(), crossings, rng);
  if (rssi < p.reader_sensitivity) return std::nullopt;
  return rssi;
}

std::optional<double> uwb_range_estimate(const PropagationParams& p, double true_distance,
                                         bool nlos, Rng& rng) {
  if (true_distance > p.uwb_max_range) return std::nullopt;
  const double mean = true_distance + (nlos ? p.uwb_nlos_bias : 0.0);
  return std::max(0.0, rng.normal(mean, p.uwb_sigma));
}

bool nfc_readable(const PropagationParams& p, double distance) { return distance <= p.nfc_range; }

namespace {

struct Field {
  const char* key;
  double PropagationParams::*member;
};

constexpr Field kFields[] = {
    {"tx_power_1m", &PropagationParams::tx_power_1m},
    {"path_loss_exponent", &PropagationParams::path_loss_exponent},
    {"rssi_noise_sigma", &PropagationParams::rssi_noise_sigma},
    {"reader_sensitivity", &PropagationParams::reader_sensitivity},
    {"wall_penalty", &PropagationParams::wall_penalty},
    {"uwb_max_range", &PropagationParams::uwb_max_range},
    {"uwb_sigma", &PropagationParams::uwb_sigma},
    {"uwb_nlos_bias", &PropagationParams::uwb_nlos_bias},
    {"nfc_range", &PropagationParams::nfc_range},
};

}  // namespace

PropagationParams radio_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "radio must be an object");
  PropagationParams p;
  for (const auto& [key, value] : j.items()) {
    const auto it = std::find_if(std::begin(kFields), std::end(kFields),
                                 [&](const Field& f) { return key == f.key; });
    if (it == std::end(kFields)) throw Error(ErrorCode::ParseError, "unknown radio field " + key);
    if (!value.is_number()) throw Error(ErrorCode::ParseError, "radio." + key + " must be a number");
    p.*(it->member) = value.get<double>();
  }
  validate(p);
  return p;
}

nlohmann::ordered_json radio_to_json(const PropagationParams& p) {
  nlohmann::ordered_json j;
  for (const auto& f : kFields) j[f.key] = p.*(f.member);
  return j;
}

}  // namespace dial
