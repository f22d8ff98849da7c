/* SPDX-License-Identifier: Apache-2.0 */

#include "dial/hunt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "dial/error.hpp"

namespace dial {

std::string_view agent_kind_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::RadarGradient: return "radar_gradient";
    case AgentKind::BuzzWalker: return "buzz_walker";
    case AgentKind::RandomWalk: return "random_walk";
  }
  return "unknown";
}

std::string_view method_name(LocateMethod m) {
  switch (m) {
    case LocateMethod::Buzzer: return "buzzer";
    case LocateMethod::Radar: return "radar";
    case LocateMethod::Search: return "search";
  }
  return "unknown";
}

void validate(const Agent& a) {
  if (!(a.step_size > 0.0) || !(a.locate_radius > 0.0) || !(a.walk_speed > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "agent sizes and speed must be > 0");
  }
}

namespace {

constexpr double kTick = 0.1;
constexpr double kFieldCell = 0.1;
// Coarse RSSI distances are offset so any UWB reading ranks better.
constexpr double kCoarseOffset = 1000.0;

const std::array<Vec2, 8>& compass() {
  static const std::array<Vec2, 8> dirs = [] {
    std::array<Vec2, 8> d;
    for (int i = 0; i < 8; ++i) {
      const double a = i * std::numbers::pi / 4.0;
      d[static_cast<std::size_t>(i)] = Vec2(std::cos(a), std::sin(a));
    }
    return d;
  }();
  return dirs;
}

/// Walkable distance to a point on a grid, 8-connected, edges blocked by walls.
class DistanceField {
 public:
  DistanceField(const World& world, const Vec2& target) : world_(world) {
    nx_ = std::max(1, static_cast<int>(std::ceil(world.bounds().max.x() / kFieldCell)));
    ny_ = std::max(1, static_cast<int>(std::ceil(world.bounds().max.y() / kFieldCell)));
    dist_.assign(static_cast<std::size_t>(nx_ * ny_), std::numeric_limits<double>::infinity());

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    const int start = cell_of(target);
    const double d0 = (centre(start) - target).norm();
    dist_[static_cast<std::size_t>(start)] = d0;
    queue.push({d0, start});
    while (!queue.empty()) {
      const auto [d, c] = queue.top();
      queue.pop();
      if (d > dist_[static_cast<std::size_t>(c)]) continue;
      const int cx = c % nx_;
      const int cy = c / nx_;
      for (int ox = -1; ox <= 1; ++ox) {
        for (int oy = -1; oy <= 1; ++oy) {
          if (ox == 0 && oy == 0) continue;
          const int x = cx + ox;
          const int y = cy + oy;
          if (x < 0 || y < 0 || x >= nx_ || y >= ny_) continue;
          const int n = y * nx_ + x;
          if (count_crossings(centre(c), centre(n), world.walls()) > 0) continue;
          const double nd = d + kFieldCell * std::hypot(ox, oy);
          if (nd < dist_[static_cast<std::size_t>(n)]) {
            dist_[static_cast<std::size_t>(n)] = nd;
            queue.push({nd, n});
          }
        }
      }
    }
  }

  double at(const Vec2& p) const { return dist_[static_cast<std::size_t>(cell_of(p))]; }

 private:
  int cell_of(const Vec2& p) const {
    const int x = std::clamp(static_cast<int>(p.x() / kFieldCell), 0, nx_ - 1);
    const int y = std::clamp(static_cast<int>(p.y() / kFieldCell), 0, ny_ - 1);
    return y * nx_ + x;
  }
  Vec2 centre(int c) const {
    return Vec2((c % nx_ + 0.5) * kFieldCell, (c / nx_ + 0.5) * kFieldCell);
  }

  const World& world_;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<double> dist_;
};

class Hunter {
 public:
  Hunter(World& world, std::size_t reader, double time_limit)
      : world_(world),
        reader_(reader),
        start_(world.clock()),
        deadline_(world.clock() + time_limit),
        rng_(world.scenario().seed ^ 0x9E3779B97F4A7C15ull) {}

  HuntReport run(std::span<const HuntLeg> legs) {
    for (const auto& leg : legs) {
      validate(leg.agent);
      if (world_.find_tag(leg.tag) == nullptr) throw Error(ErrorCode::UnknownTag, leg.tag.hex());
    }
    world_.reader(reader_);  // NoSuchReader
    for (const auto& leg : legs) {
      auto result = hunt(leg);
      if (!result) {
        report_.timed_out = true;
        break;
      }
      report_.tags.push_back(*result);
    }
    report_.total_time = world_.clock() - start_;
    return report_;
  }

 private:
  struct Expired {};

  bool out_of_time() const { return world_.clock() >= deadline_ - 1e-9; }
  void check_time() const {
    if (out_of_time()) throw Expired{};
  }

  const Vec2& pos() { return world_.reader(reader_).position(); }

  bool located(const Tag& tag, const Agent& agent) {
    return (pos() - tag.position()).norm() <= agent.locate_radius + 1e-12;
  }

  void wait(double dt) {
    check_time();
    world_.step(dt);
  }

  /// Walks by (dx, dy); returns the actual displacement.
  Vec2 walk(const Vec2& delta, const Agent& agent) {
    check_time();
    const Vec2 before = pos();
    world_.move_reader(reader_, delta.x(), delta.y());
    const Vec2 moved = pos() - before;
    const double dist = moved.norm();
    report_.path_length += dist;
    world_.step(std::max(dist / agent.walk_speed, kTick));
    return moved;
  }

  std::optional<TagHunt> hunt(const HuntLeg& leg) {
    try {
      check_time();
      const Tag& tag = *world_.find_tag(leg.tag);
      while (world_.reader(reader_).find(leg.tag) == nullptr) wait(kTick);
      TagHunt th;
      th.tag_id = leg.tag;
      th.discovered_at = world_.clock();
      switch (leg.agent.kind) {
        case AgentKind::RadarGradient:
          th.method = LocateMethod::Radar;
          radar_gradient(tag, leg.agent);
          break;
        case AgentKind::BuzzWalker:
          th.method = LocateMethod::Buzzer;
          buzz_walker(tag, leg.agent);
          break;
        case AgentKind::RandomWalk:
          th.method = LocateMethod::Search;
          random_walk(tag, leg.agent);
          break;
      }
      th.located_at = world_.clock();
      return th;
    } catch (const Expired&) {
      return std::nullopt;
    }
  }

  /// Lower is closer.  UWB estimate when in range, else offset coarse RSSI
  /// distance from a beacon heard at the current position.
  double signal(const Tag& tag) {
    check_time();
    const RadarResult r = radar_read(world_, reader_, tag.id());
    if (const double* m = std::get_if<double>(&r)) return *m;
    const double moved_at = world_.clock();
    for (;;) {
      const DiscoveredTag* d = world_.reader(reader_).find(tag.id());
      if (d != nullptr && d->last_seen >= moved_at - 1e-9) {
        return kCoarseOffset + d->coarse_distance;
      }
      wait(kTick);
    }
  }

  void radar_gradient(const Tag& tag, const Agent& agent) {
    while (!located(tag, agent)) {
      double best_v = std::numeric_limits<double>::infinity();
      std::optional<Vec2> best_dir;
      for (const Vec2& dir : compass()) {
        const Vec2 moved = walk(dir * agent.step_size, agent);
        if (located(tag, agent)) return;
        if (moved.norm() < 1e-9) continue;
        const double v = signal(tag);
        walk(-moved, agent);
        if (v < best_v) {
          best_v = v;
          best_dir = dir;
        }
      }
      if (!best_dir) {
        walk(compass()[rng_.next_u64() % 8] * agent.step_size, agent);
        continue;
      }
      double last = best_v;
      for (;;) {
        const Vec2 moved = walk(*best_dir * agent.step_size, agent);
        if (located(tag, agent)) return;
        if (moved.norm() < 1e-9) break;
        const double v = signal(tag);
        if (!(v < last)) break;
        last = v;
      }
    }
  }

  void buzz_walker(const Tag& tag, const Agent& agent) {
    const DistanceField field(world_, tag.position());
    while (!located(tag, agent)) {
      if (!tag.buzzing()) {
        check_time();
        const auto deliveries = world_.buzz(reader_, tag.id());
        const bool started = std::any_of(deliveries.begin(), deliveries.end(), [&](const auto& d) {
          return d.tag_id == tag.id() && d.result == FrameResult::Accepted;
        });
        if (!started) {
          wait(kTick);
          continue;
        }
      }
      const double here = field.at(pos());
      double best = here;
      std::optional<Vec2> best_delta;
      for (double scale : {1.0, 0.5}) {
        for (const Vec2& dir : compass()) {
          const Vec2 delta = dir * agent.step_size * scale;
          const Vec2 dest = world_.preview_move(pos(), delta.x(), delta.y());
          if ((dest - pos()).norm() < 1e-9) continue;
          const double v = field.at(dest);
          if (v < best - 1e-12) {
            best = v;
            best_delta = delta;
          }
        }
        if (best_delta) break;
      }
      if (!best_delta) {
        // Same grid cell as the target but outside locate_radius: head straight in.
        const Vec2 to_tag = tag.position() - pos();
        if (to_tag.norm() < 1e-9) return;
        best_delta = to_tag.normalized() * std::min(agent.step_size, to_tag.norm());
      }
      walk(*best_delta, agent);
    }
  }

  void random_walk(const Tag& tag, const Agent& agent) {
    while (!located(tag, agent)) walk(compass()[rng_.next_u64() % 8] * agent.step_size, agent);
  }

  World& world_;
  std::size_t reader_;
  double start_;
  double deadline_;
  Rng rng_;
  HuntReport report_;
};

}  // namespace

HuntReport run_hunt(World& world, std::span<const HuntLeg> legs, double time_limit,
                    std::size_t reader_index) {
  return Hunter(world, reader_index, time_limit).run(legs);
}

HuntReport run_agent(World& world, const Agent& agent, std::span<const TagId> order,
                     double time_limit, std::size_t reader_index) {
  std::vector<HuntLeg> legs;
  for (const auto& id : order) legs.push_back({id, agent});
  return run_hunt(world, legs, time_limit, reader_index);
}

std::vector<HuntLeg> default_hunt_plan(const World& world) {
  std::vector<HuntLeg> legs;
  for (const Tag& t : world.tags()) {
    if (t.model() == Model::UwbRaw) legs.push_back({t.id(), Agent{AgentKind::RadarGradient}});
  }
  for (const Tag& t : world.tags()) {
    if (t.model() == Model::BleAc) legs.push_back({t.id(), Agent{AgentKind::BuzzWalker}});
  }
  return legs;
}

nlohmann::ordered_json hunt_report_to_json(const HuntReport& r) {
  nlohmann::ordered_json j;
  j["tags"] = nlohmann::ordered_json::array();
  for (const auto& t : r.tags) {
    nlohmann::ordered_json row;
    row["tag_id"] = t.tag_id.hex();
    row["discovered_at"] = t.discovered_at;
    row["located_at"] = t.located_at;
    row["method"] = method_name(t.method);
    j["tags"].push_back(std::move(row));
  }
  j["total_time"] = r.total_time;
  j["path_length"] = r.path_length;
  j["timed_out"] = r.timed_out;
  return j;
}

}  // namespace dial
