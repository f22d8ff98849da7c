/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>

namespace dial {

using Vec2 = Eigen::Vector2d;

struct Segment {
  Vec2 a;
  Vec2 b;
};

/// Axis-aligned, min corner and max corner.
struct Rect {
  Vec2 min;
  Vec2 max;

  bool contains(const Vec2& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  Vec2 clamp(const Vec2& p) const { return p.cwiseMax(min).cwiseMin(max); }
};

inline double cross(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

/// Parameter t in [0, 1] along p->q where it meets `wall`, or nullopt if the
/// segments do not cross.  Parallel segments never count as crossing.
inline std::optional<double> crossing_param(const Vec2& p, const Vec2& q, const Segment& wall) {
  const Vec2 r = q - p;
  const Vec2 s = wall.b - wall.a;
  const double denom = cross(r, s);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const Vec2 ap = wall.a - p;
  const double t = cross(ap, s) / denom;
  const double u = cross(ap, r) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

inline int count_crossings(const Vec2& p, const Vec2& q, std::span<const Segment> walls) {
  int n = 0;
  for (const auto& w : walls) {
    if (crossing_param(p, q, w)) ++n;
  }
  return n;
}

}  // namespace dial
