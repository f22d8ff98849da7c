/* SPDX-License-Identifier: Apache-2.0 */

/** Scripted hunt agents.
 *
 * An agent drives reader 0 (or any reader) through World's public command
 * surface only, so every hunt is replayable from the world's trace.
 * Walking advances simulated time at `walk_speed`.
 *
 * - radar_gradient: reads the UWB range, probes the 8 compass directions
 *   one step out and back, and walks along the best probe for as long as
 *   the reading keeps improving.  Out of UWB range it falls back to the
 *   RSSI-derived coarse distance, which always ranks below any UWB reading.
 * - buzz_walker: keeps the target buzzing and descends the acoustic
 *   distance field, i.e. the walkable (wall-avoiding) distance to the tag.
 * - random_walk: uniform random compass steps. */

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "dial/world.hpp"
#include "json.hpp"

namespace dial {

enum class AgentKind { RadarGradient, BuzzWalker, RandomWalk };

std::string_view agent_kind_name(AgentKind kind);

struct Agent {
  AgentKind kind = AgentKind::RadarGradient;
  double step_size = 0.25;     // m
  double locate_radius = 0.5;  // m
  double walk_speed = 1.0;     // m/s
};

/// Throws Error{InvalidArgument} for non-positive sizes.
void validate(const Agent& agent);

enum class LocateMethod { Buzzer, Radar, Search };

std::string_view method_name(LocateMethod m);

struct TagHunt {
  TagId tag_id;
  double discovered_at = 0.0;
  double located_at = 0.0;
  LocateMethod method = LocateMethod::Radar;
};

struct HuntReport {
  std::vector<TagHunt> tags;
  double total_time = 0.0;
  double path_length = 0.0;
  bool timed_out = false;
};

struct HuntLeg {
  TagId tag;
  Agent agent;
};

/// Hunts `legs` in order with one shared time limit.  A timed-out hunt
/// returns the legs completed so far with timed_out set.  Throws
/// Error{UnknownTag} if a leg names a tag not in the world.
HuntReport run_hunt(World& world, std::span<const HuntLeg> legs, double time_limit,
                    std::size_t reader_index = 0);

/// One agent hunting `order` in sequence.
HuntReport run_agent(World& world, const Agent& agent, std::span<const TagId> order,
                     double time_limit, std::size_t reader_index = 0);

/// UWB-RAW tags first with radar_gradient, then BLE-AC tags with
/// buzz_walker, each group in scenario order.
std::vector<HuntLeg> default_hunt_plan(const World& world);

nlohmann::ordered_json hunt_report_to_json(const HuntReport& report);

}  // namespace dial
