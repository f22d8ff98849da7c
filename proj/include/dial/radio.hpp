/* SPDX-License-Identifier: Apache-2.0 */

/** Propagation and reachability.
 *
 * BLE uses a log-distance path-loss model with a fixed per-wall penalty:
 *
 *     rssi(d) = tx_power_1m - 10 n log10(d) - walls * wall_penalty + N(0, sigma)
 *
 * With the defaults and no noise the discovery radius is
 * 10^((-59 - -85) / 20) ~= 19.95 m.  UWB two-way ranging returns the true
 * distance plus an optional non-line-of-sight bias and Gaussian noise, up to
 * uwb_max_range.  NFC is a hard 10 cm gate. */

#pragma once

#include <optional>
#include <span>

#include "dial/geometry.hpp"
#include "dial/rng.hpp"
#include "json.hpp"

namespace dial {

inline constexpr double kNfcRange = 0.10;
inline constexpr double kMinDistance = 0.1;

struct PropagationParams {
  double tx_power_1m = -59.0;        // dBm
  double path_loss_exponent = 2.0;
  double rssi_noise_sigma = 0.0;     // dB
  double reader_sensitivity = -85.0; // dBm
  double wall_penalty = 3.0;         // dB per wall
  double uwb_max_range = 5.0;        // m
  double uwb_sigma = 0.10;           // m
  double uwb_nlos_bias = 0.20;       // m
  double nfc_range = kNfcRange;      // m, fixed

  bool operator==(const PropagationParams&) const = default;
};

/// Throws Error{InvalidParams}.
void validate(const PropagationParams& params);

/// Distance at which noiseless, wall-free RSSI equals the sensitivity.
double discovery_radius(const PropagationParams& params);

double rssi_at(const PropagationParams& params, double distance, int walls_crossed, Rng& rng);

/// Inverse of the noiseless, wall-free path-loss curve.
double distance_from_rssi(const PropagationParams& params, double rssi);

/// Received RSSI, or nullopt below sensitivity.  `extra_crossings` adds
/// obstruction penalties not represented by wall segments (e.g. an
/// enclosing appliance).
std::optional<double> ble_deliver(const PropagationParams& params, const Vec2& src,
                                  const Vec2& dst, std::span<const Segment> walls, Rng& rng,
                                  int extra_crossings = 0);

/// nullopt when the tag is beyond uwb_max_range.
std::optional<double> uwb_range_estimate(const PropagationParams& params, double true_distance,
                                         bool nlos, Rng& rng);

bool nfc_readable(const PropagationParams& params, double distance);

/// Keys as in the struct; unknown keys are rejected with Error{ParseError}.
PropagationParams radio_from_json(const nlohmann::json& j);
nlohmann::ordered_json radio_to_json(const PropagationParams& params);

}  // namespace dial
