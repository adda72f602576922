// Copyright 2026 AGNav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Synthetic 2D laser scans cast against the vector map. Beams are traced
// from a ground-truth pose against same-floor leaf-area walls plus optional
// clutter discs. Every return keeps a label saying what it actually hit so
// filters can be graded against the truth in tests; the label is synthesis
// metadata, not something a tracker may consume.

#ifndef AGNAV_SCAN_SIM_HPP
#define AGNAV_SCAN_SIM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "agnav/area_graph.hpp"
#include "agnav/errors.hpp"
#include "agnav/geometry.hpp"
#include "agnav/rng.hpp"

namespace agnav {

enum class BeamLabel : std::uint8_t { kStructure, kClutter, kMaxRange };

struct Beam {
  double angle = 0.0;  // radians, sensor frame, strictly increasing over the frame
  double range = 0.0;  // meters; equals the frame's max_range on a miss
  BeamLabel label = BeamLabel::kMaxRange;
};

struct ScanFrame {
  double timestamp = 0.0;
  double max_range = 12.0;
  Pose2D true_pose;  // synthesis input, kept for test oracles only
  std::vector<Beam> beams;

  /// Beams that returned something closer than the range cap.
  int finite_count() const {
    int n = 0;
    for (const Beam& b : beams) {
      if (b.range < max_range) ++n;
    }
    return n;
  }
};

/// Movable obstacle that is not part of the vector map.
struct ClutterDisc {
  Vec2 center;
  double radius = 0.2;
};

/// One wall segment of a leaf-area boundary. The normal is unit length and
/// points into the owning area.
struct MapSegment {
  Vec2 a;
  Vec2 b;
  Vec2 inward_normal;
  int area = -1;  // index into AreaGraph::areas
};

/// Boundary segments of every leaf area on one floor. Structure leaves are
/// included: pillars and shaft cores are solid for a laser even though they
/// are not traversable.
inline std::vector<MapSegment> structure_segments(const AreaGraph& g,
                                                  const std::string& level) {
  std::vector<MapSegment> out;
  for (std::size_t ai = 0; ai < g.areas.size(); ++ai) {
    const Area& a = g.areas[ai];
    if (!g.is_leaf(a) || a.level != level) continue;
    const bool ccw = polygon_is_ccw(a.ring);
    const std::size_t n = a.ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      MapSegment s;
      s.a = a.ring[i];
      s.b = a.ring[(i + 1) % n];
      const Vec2 d = (s.b - s.a).normalized();
      if (d == Vec2{0.0, 0.0}) continue;
      s.inward_normal = ccw ? d.perp() : d.perp() * -1.0;
      s.area = static_cast<int>(ai);
      out.push_back(s);
    }
  }
  return out;
}

/// Distance along the ray o + t*dir to the nearest wall, or +inf on a miss.
/// Writes the hit segment index to \p hit when given.
inline double raycast_walls(const std::vector<MapSegment>& walls, const Vec2& o,
                            const Vec2& dir, int* hit = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  int best_i = -1;
  for (std::size_t i = 0; i < walls.size(); ++i) {
    const Vec2 ab = walls[i].b - walls[i].a;
    const double den = dir.cross(ab);
    if (std::abs(den) < 1e-12) continue;
    const Vec2 w = walls[i].a - o;
    const double t = w.cross(ab) / den;
    const double u = w.cross(dir) / den;
    if (t < 1e-9 || u < -1e-9 || u > 1.0 + 1e-9) continue;
    if (t < best) {
      best = t;
      best_i = static_cast<int>(i);
    }
  }
  if (hit) *hit = best_i;
  return best;
}

/// Distance along the ray to the near surface of a disc, or +inf.
inline double raycast_disc(const ClutterDisc& c, const Vec2& o, const Vec2& dir) {
  const Vec2 oc = c.center - o;
  const double m = dir.dot(oc);
  const double disc = m * m - (oc.squared_norm() - c.radius * c.radius);
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  const double t = m - std::sqrt(disc);
  return t > 1e-9 ? t : std::numeric_limits<double>::infinity();
}

struct ScanConfig {
  int beams = 360;
  double sigma = 0.0;     // Gaussian range noise, meters
  double max_range = 12.0;
  double timestamp = 0.0;
};

/// Casts cfg.beams rays over the full circle from \p pose against a
/// prebuilt wall set. The caller vouches that the pose is inside the mapped
/// space; use the AreaGraph overload to have that checked.
inline ScanFrame simulate_scan(const std::vector<MapSegment>& walls, const Pose2D& pose,
                               const ScanConfig& cfg, std::mt19937_64& rng,
                               const std::vector<ClutterDisc>& clutter = {}) {
  ScanFrame f;
  f.timestamp = cfg.timestamp;
  f.max_range = cfg.max_range;
  f.true_pose = pose;
  f.beams.reserve(static_cast<std::size_t>(cfg.beams));
  const Vec2 o = pose.position();
  for (int i = 0; i < cfg.beams; ++i) {
    Beam b;
    b.angle = -std::numbers::pi +
              2.0 * std::numbers::pi * static_cast<double>(i) / cfg.beams;
    const double wa = pose.theta + b.angle;
    const Vec2 dir{std::cos(wa), std::sin(wa)};
    const double t_wall = raycast_walls(walls, o, dir);
    double t_clutter = std::numeric_limits<double>::infinity();
    for (const ClutterDisc& c : clutter) {
      t_clutter = std::min(t_clutter, raycast_disc(c, o, dir));
    }
    const double t = std::min(t_wall, t_clutter);
    if (t >= cfg.max_range) {
      b.range = cfg.max_range;
      b.label = BeamLabel::kMaxRange;
    } else {
      b.label = t_clutter < t_wall ? BeamLabel::kClutter : BeamLabel::kStructure;
      double r = t;
      if (cfg.sigma > 0.0) r += cfg.sigma * rand_gauss(rng);
      b.range = std::clamp(r, 1e-3, cfg.max_range);
    }
    f.beams.push_back(b);
  }
  return f;
}

/// Convenience overload that collects the walls of the pose's floor and
/// verifies the pose lies inside a leaf area first.
inline ScanFrame simulate_scan(const AreaGraph& g, const Pose2D& pose,
                               const ScanConfig& cfg, std::mt19937_64& rng,
                               const std::vector<ClutterDisc>& clutter = {}) {
  try {
    g.locate_leaf_area(pose.position(), pose.level);
  } catch (const NotInAnyAreaError&) {
    throw PoseOutsideMapError("scan pose is not inside any leaf area");
  }
  return simulate_scan(structure_segments(g, pose.level), pose, cfg, rng, clutter);
}

}  // namespace agnav

#endif  // AGNAV_SCAN_SIM_HPP
