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
// Shared localization fixtures: single-room worlds and a long corridor
// whose side walls carry slight sawtooth facets plus a few deep alcoves.
// The facets make every wall return weakly informative about motion along
// the corridor, which is exactly the regime where corridor-aware weighting
// should beat plain robust weighting.

#ifndef AGNAV_TESTS_LOC_FIXTURES_HPP
#define AGNAV_TESTS_LOC_FIXTURES_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "agnav/area_graph.hpp"
#include "agnav/localizer.hpp"
#include "agnav/scan_sim.hpp"

namespace agtest {

inline agnav::Area loc_area(const std::string& name, agnav::AreaType type,
                            const std::string& parent, const std::string& level,
                            std::vector<agnav::Vec2> ring, long long way_id) {
  agnav::Area a;
  a.way_id = way_id;
  a.name = name;
  a.type = type;
  a.parent = parent;
  a.level = level;
  if (!agnav::polygon_is_ccw(ring)) std::reverse(ring.begin(), ring.end());
  a.ring = std::move(ring);
  a.bbox = agnav::bbox_of(a.ring);
  return a;
}

/// Root structure hull plus one leaf room with the given boundary.
inline agnav::AreaGraph room_fixture(std::vector<agnav::Vec2> ring,
                                     agnav::AreaType type = agnav::AreaType::kRoom) {
  agnav::BBox box = agnav::bbox_of(ring);
  const std::vector<agnav::Vec2> hull{{box.min.x - 0.5, box.min.y - 0.5},
                                      {box.max.x + 0.5, box.min.y - 0.5},
                                      {box.max.x + 0.5, box.max.y + 0.5},
                                      {box.min.x - 0.5, box.max.y + 0.5}};
  agnav::AreaGraph g;
  g.georef = {31.0, 121.0};
  g.areas.push_back(loc_area("hull", agnav::AreaType::kStructure, "", "1", hull, 9000));
  g.areas.push_back(loc_area("room", type, "hull", "1", std::move(ring), 9001));
  g.reindex();
  return g;
}

inline agnav::AreaGraph square_room(double side = 10.0) {
  return room_fixture({{0.0, 0.0}, {side, 0.0}, {side, side}, {0.0, side}});
}

/// Right trapezoid: no rotational symmetry, so relocalization has a unique
/// optimum.
inline agnav::AreaGraph trapezoid_room() {
  return room_fixture({{0.0, 0.0}, {8.0, 0.0}, {8.0, 5.0}, {0.0, 3.0}});
}

/// Two congruent, mutually invisible rooms under one hull. Any scan taken
/// in one of them is explained equally well by the other.
inline agnav::AreaGraph twin_rooms() {
  agnav::AreaGraph g;
  g.georef = {31.0, 121.0};
  g.areas.push_back(loc_area("hull", agnav::AreaType::kStructure, "", "1",
                             {{-1.0, -1.0}, {17.0, -1.0}, {17.0, 5.0}, {-1.0, 5.0}}, 9000));
  g.areas.push_back(loc_area("Ra", agnav::AreaType::kRoom, "hull", "1",
                             {{0.0, 0.0}, {6.0, 0.0}, {6.0, 4.0}, {0.0, 4.0}}, 9001));
  g.areas.push_back(loc_area("Rb", agnav::AreaType::kRoom, "hull", "1",
                             {{10.0, 0.0}, {16.0, 0.0}, {16.0, 4.0}, {10.0, 4.0}}, 9002));
  g.reindex();
  return g;
}

struct CorridorSpec {
  double length = 40.0;
  double width = 3.0;
  // Facets repeat every 2*tooth_len along the wall; a pose estimate offset
  // by exactly that period sees near-zero residuals on every side wall and
  // only the aperiodic features (alcove edges, end walls) disagree.
  double tooth_len = 0.25;   // facet length along the axis
  double tooth_amp = 0.02;   // facet rise toward the interior
  double alcove_depth = 0.5;
  double alcove_width = 1.0;
  // Alcove centers alternate sides: bottom wall, then top, every spacing.
  double alcove_first = 6.0;
  double alcove_spacing = 12.0;
};

namespace detail {

/// Appends a zigzag from the current endpoint to x = x1, toggling between
/// y_base and y_base + amp.
inline void zigzag_to(std::vector<agnav::Vec2>& out, double x1, double y_base,
                      double amp, double tooth) {
  double x = out.back().x;
  bool high = std::abs(out.back().y - (y_base + amp)) < 1e-9;
  while (x + tooth < x1 - 1e-9) {
    x += tooth;
    high = !high;
    out.push_back({x, high ? y_base + amp : y_base});
  }
  if (x1 - x > 1e-9) out.push_back({x1, y_base});
}

/// One side wall, left to right, with sawtooth facets and alcoves opening
/// away from the interior. interior_dir is +1 when the corridor lies above
/// the wall, -1 when below.
inline std::vector<agnav::Vec2> side_wall(const CorridorSpec& s, double y_base,
                                          double interior_dir,
                                          const std::vector<double>& alcoves) {
  std::vector<agnav::Vec2> out{{0.0, y_base}};
  const double amp = s.tooth_amp * interior_dir;
  const double floor_y = y_base - s.alcove_depth * interior_dir;
  for (double c : alcoves) {
    zigzag_to(out, c - 0.5 * s.alcove_width, y_base, amp, s.tooth_len);
    out.push_back({c - 0.5 * s.alcove_width, floor_y});
    out.push_back({c + 0.5 * s.alcove_width, floor_y});
    out.push_back({c + 0.5 * s.alcove_width, y_base});
  }
  zigzag_to(out, s.length, y_base, amp, s.tooth_len);
  return out;
}

}  // namespace detail

/// Long corridor leaf under a structure hull, walls per CorridorSpec.
inline agnav::AreaGraph corridor_fixture(const CorridorSpec& spec = {}) {
  std::vector<double> bottom_alcoves, top_alcoves;
  bool bottom = true;
  for (double c = spec.alcove_first; c < spec.length - 2.0; c += spec.alcove_spacing) {
    (bottom ? bottom_alcoves : top_alcoves).push_back(c);
    bottom = !bottom;
  }

  std::vector<agnav::Vec2> ring =
      detail::side_wall(spec, 0.0, +1.0, bottom_alcoves);
  std::vector<agnav::Vec2> top =
      detail::side_wall(spec, spec.width, -1.0, top_alcoves);
  ring.insert(ring.end(), top.rbegin(), top.rend());

  const double m = spec.alcove_depth + 0.5;
  const std::vector<agnav::Vec2> hull{{-0.5, -m},
                                      {spec.length + 0.5, -m},
                                      {spec.length + 0.5, spec.width + m},
                                      {-0.5, spec.width + m}};
  agnav::AreaGraph g;
  g.georef = {31.0, 121.0};
  g.areas.push_back(loc_area("hull", agnav::AreaType::kStructure, "", "1", hull, 9000));
  g.areas.push_back(
      loc_area("hall", agnav::AreaType::kCorridor, "hull", "1", std::move(ring), 9001));
  g.reindex();
  return g;
}

struct CorridorRun {
  double mean_abs_long_err_corridor = 0.0;  // direction factor + downsampling on
  double mean_abs_long_err_robust = 0.0;    // robust weights only
  int frames = 0;
  int rejected_frames = 0;  // non-Ok statuses summed over both modes
};

/// Walks the corridor for n frames. Every frame the tracker is seeded with
/// the true pose pushed 0.5 m along the corridor axis, and both weight
/// configurations solve the same noisy scan. Longitudinal recovery error
/// is averaged per mode.
inline CorridorRun corridor_weighting_run(int frames = 100, unsigned seed = 7,
                                          double noise_sigma = 0.02,
                                          double prior_offset = 0.5) {
  const agnav::AreaGraph g = corridor_fixture();
  const std::vector<agnav::MapSegment> walls = agnav::structure_segments(g, "1");

  agnav::ScanConfig sc;
  sc.beams = 720;
  sc.sigma = noise_sigma;
  sc.max_range = 12.0;

  agnav::TrackerConfig with_corridor;
  with_corridor.weight_mode = agnav::WeightMode::kRobustTimesCorridor;
  agnav::TrackerConfig without = with_corridor;
  without.weight_mode = agnav::WeightMode::kRobustOnly;

  std::mt19937_64 rng(seed);
  CorridorRun run;
  run.frames = frames;
  for (int k = 0; k < frames; ++k) {
    agnav::Pose2D truth;
    truth.x = 5.0 + 29.0 * static_cast<double>(k) / std::max(1, frames - 1);
    truth.y = 1.5;
    truth.theta = 0.0;
    truth.level = "1";
    const agnav::ScanFrame f = agnav::simulate_scan(walls, truth, sc, rng);

    agnav::Pose2D prior = truth;
    prior.x += prior_offset;

    const agnav::TrackResult a = agnav::icp_track(f, walls, prior, with_corridor);
    const agnav::TrackResult b = agnav::icp_track(f, walls, prior, without);
    if (!a.ok()) ++run.rejected_frames;
    if (!b.ok()) ++run.rejected_frames;
    run.mean_abs_long_err_corridor += std::abs(a.pose.x - truth.x);
    run.mean_abs_long_err_robust += std::abs(b.pose.x - truth.x);
  }
  run.mean_abs_long_err_corridor /= std::max(1, frames);
  run.mean_abs_long_err_robust /= std::max(1, frames);
  return run;
}

}  // namespace agtest

#endif  // AGNAV_TESTS_LOC_FIXTURES_HPP
