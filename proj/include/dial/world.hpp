/* SPDX-License-Identifier: Apache-2.0 */

/** Deterministic simulation root.
 *
 * A World owns the floor plan, the tags, the readers, one seeded Rng and an
 * append-only event log.  Every state-changing call is also recorded as a
 * Command, so replaying the trace against the same scenario reproduces the
 * event log byte for byte.
 *
 * Time is kept in integer milliseconds and advanced in sub-steps of at most
 * 100 ms.  Within a sub-step, tag emissions are delivered in time order. */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dial/geometry.hpp"
#include "dial/radio.hpp"
#include "dial/reader.hpp"
#include "dial/rng.hpp"
#include "dial/tag.hpp"
#include "json.hpp"

namespace dial {

inline constexpr std::int64_t kSubStepMs = 100;
inline constexpr double kWallStandoff = 0.05;

struct Region {
  std::string name;
  Rect rect;
  bool nlos = false;
};

struct Scenario {
  std::string name;
  Vec2 bounds = Vec2(10.0, 8.0);
  std::vector<Segment> walls;
  std::vector<Region> regions;
  PropagationParams radio;
  std::vector<TagConfig> tags;
  Vec2 reader_start = Vec2::Zero();
  std::uint64_t seed = 0;
};

/// Throws Error{ParseError} on shape/type problems (including unknown
/// keys) and Error{SemanticError} for out-of-bounds positions, duplicate
/// ids, invalid radio parameters or unreadable NDEF images.
Scenario parse_scenario(const nlohmann::json& doc);
nlohmann::ordered_json scenario_to_json(const Scenario& scenario);

/// Names accepted by bundled_scenario().
std::vector<std::string> bundled_scenario_names();
/// Throws Error{ParseError} for an unknown name.
nlohmann::json bundled_scenario(std::string_view name);

struct Event {
  double t = 0.0;
  std::string kind;
  nlohmann::ordered_json fields = nlohmann::ordered_json::object();

  /// One LDJSON line (no trailing newline), "t" and "kind" first.
  std::string to_line() const;
};

/// A recorded state-changing call.
struct Command {
  enum class Kind { Step, Move, Buzz, Radar, NfcRead, AddReader };

  Kind kind = Kind::Step;
  std::size_t reader = 0;
  double dt = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  TagId tag;
  std::optional<std::string> password;

  bool operator==(const Command&) const = default;
};

nlohmann::ordered_json command_to_json(const Command& c);
/// Throws Error{ParseError}.
Command command_from_json(const nlohmann::json& j);

struct ActivationDelivery {
  TagId tag_id;
  FrameResult result;
};

class World {
 public:
  explicit World(Scenario scenario);

  /// Advances the clock by dt (> 0, rounded to whole milliseconds, at least
  /// one).  Returns the events appended by this call, ending with one
  /// ClockAdvance.  Throws Error{InvalidArgument} for dt <= 0.
  std::vector<Event> step(double dt);

  /// Clamped to bounds; stops kWallStandoff short of the first wall hit.
  /// Throws Error{NoSuchReader}.
  Vec2 move_reader(std::size_t reader_index, double dx, double dy);
  /// Where move_reader would end up, without moving.
  Vec2 preview_move(const Vec2& from, double dx, double dy) const;

  /// Broadcasts the reader's activation frame to every tag in BLE range.
  /// Throws Error{UnknownTag} or Error{NoSuchReader}.
  std::vector<ActivationDelivery> buzz(std::size_t reader_index, const TagId& id,
                                       std::optional<std::string> password = std::nullopt);

  std::size_t add_reader(const Vec2& position);

  /// Runs a recorded command; returns the events it appended.
  std::vector<Event> apply(const Command& command);

  Reader& reader(std::size_t index);
  const Reader& reader(std::size_t index) const;
  std::size_t reader_count() const { return readers_.size(); }

  std::vector<Tag>& tags() { return tags_; }
  const std::vector<Tag>& tags() const { return tags_; }
  Tag* find_tag(const TagId& id);
  const Tag* find_tag(const TagId& id) const;

  const Scenario& scenario() const { return scenario_; }
  Rect bounds() const { return Rect{Vec2::Zero(), scenario_.bounds}; }
  const std::vector<Segment>& walls() const { return scenario_.walls; }
  const PropagationParams& radio() const { return scenario_.radio; }

  double clock() const { return static_cast<double>(clock_ms_) / 1000.0; }
  std::int64_t clock_ms() const { return clock_ms_; }
  Rng& rng() { return rng_; }

  /// Obstructions between two points that are not wall segments: the
  /// number of NLOS regions containing exactly one of them.
  int region_crossings(const Vec2& a, const Vec2& b) const;
  bool nlos_between(const Vec2& a, const Vec2& b) const { return region_crossings(a, b) > 0; }

  /// Buzzer audibility at `listener`: 1 / (1 + d^2) while playing, else 0.
  double audible_level(const Tag& tag, const Vec2& listener) const;

  const std::vector<Event>& event_log() const { return log_; }
  std::string event_log_text() const;
  const std::vector<Command>& trace() const { return trace_; }

  void record(const Command& c) { trace_.push_back(c); }
  void log(Event e) { log_.push_back(std::move(e)); }

 private:
  void sub_step(std::int64_t until_ms);
  void deliver_beacon(const Tag& tag, const Emission& e);

  Scenario scenario_;
  std::vector<Tag> tags_;
  std::vector<Reader> readers_;
  Rng rng_;
  std::int64_t clock_ms_ = 0;
  std::vector<Event> log_;
  std::vector<Command> trace_;
};

/// Throws the same errors as parse_scenario.
World load_scenario(const nlohmann::json& doc,
                    std::optional<std::uint64_t> seed_override = std::nullopt);

/// Newline-terminated lines, one per event.
std::string events_to_text(std::span<const Event> events);

}  // namespace dial
