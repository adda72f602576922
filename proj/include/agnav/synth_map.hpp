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
// Seeded generator for multi-floor campus maps used by tests and the
// benchmark harness. Layout per floor:
//
//   elevator | corridor segment 1 | segment 2 | ... | segment S | stairs
//            |  rooms above and below every segment              |
//
// Hierarchy: campus > floors > sectors > {corridor segment, rooms},
// with one elevator and one stair shaft per floor parented to the floor
// itself. Corridor segments join through full-width junction passages,
// which keeps long routes crossing many passages. Vertical shafts chain
// floors with passages labelled "f;f+1".

#ifndef AGNAV_SYNTH_MAP_HPP
#define AGNAV_SYNTH_MAP_HPP

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "agnav/area_graph.hpp"
#include "agnav/rng.hpp"

namespace agnav {

struct CampusConfig {
  std::uint64_t seed = 1;
  int floors = 3;
  int sectors = 4;         // corridor segments per floor
  int rooms_per_side = 5;  // per segment, mirrored above and below
  double room_w = 6.0;
  double room_d = 8.0;
  double corridor_w = 3.0;
  double door_w = 1.0;
  double shaft_w = 3.0;  // elevator and stair footprint along x
  bool with_elevator = true;
  bool with_stairs = true;
  GeoRef anchor{31.0, 121.0};
};

struct Campus {
  AreaGraph graph;
  CampusConfig config;
  int n_rooms = 0;
  int n_corridors = 0;
  int n_doors = 0;
  int n_junctions = 0;
  int n_vertical_passages = 0;
};

namespace detail {

/// Shared node pool quantized to the file precision, so the generated
/// graph is bit-identical to its own save/load round trip.
class NodePool {
 public:
  explicit NodePool(const GeoRef& ref) : ref_(ref) {
    OsmNode root;
    root.id = next_id_++;
    root.lat = ref.lat_deg;
    root.lon = ref.lon_deg;
    root.tags.emplace_back("name", "root");
    nodes_.push_back(root);
  }

  long long add(const Vec2& p) {
    double lat = 0.0, lon = 0.0;
    from_local(ref_, p, lat, lon);
    lat = std::round(lat * 1e7) / 1e7;
    lon = std::round(lon * 1e7) / 1e7;
    const auto key = std::make_pair(std::llround(lat * 1e7), std::llround(lon * 1e7));
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    OsmNode n;
    n.id = next_id_++;
    n.lat = lat;
    n.lon = lon;
    ids_[key] = n.id;
    nodes_.push_back(n);
    return n.id;
  }

  Vec2 local(long long id) const {
    for (const OsmNode& n : nodes_) {
      if (n.id == id) return to_local(ref_, n.lat, n.lon);
    }
    return {};
  }

  std::vector<OsmNode> take() { return std::move(nodes_); }

 private:
  GeoRef ref_;
  long long next_id_ = 1;
  std::map<std::pair<long long, long long>, long long> ids_;
  std::vector<OsmNode> nodes_;
};

}  // namespace detail

inline Campus generate_campus(const CampusConfig& cfg = {}) {
  Campus out;
  out.config = cfg;
  AreaGraph& g = out.graph;
  g.georef = cfg.anchor;
  g.root_node_id = 1;

  detail::NodePool pool(cfg.anchor);
  std::mt19937_64 rng(cfg.seed);
  long long way_id = 1000000;

  const double seg_len = cfg.rooms_per_side * cfg.room_w;
  const double total_len = cfg.sectors * seg_len;
  const double cor_y0 = cfg.room_d;
  const double cor_y1 = cfg.room_d + cfg.corridor_w;
  const double top_y = 2.0 * cfg.room_d + cfg.corridor_w;
  const double x_min = cfg.with_elevator ? -cfg.shaft_w : 0.0;
  const double x_max = cfg.with_stairs ? total_len + cfg.shaft_w : total_len;

  auto add_area = [&](const std::string& name, AreaType type, const std::string& parent,
                      const std::string& level, const std::vector<Vec2>& ring) {
    Area a;
    a.way_id = way_id++;
    a.name = name;
    a.type = type;
    a.parent = parent;
    a.level = level;
    for (const Vec2& p : ring) a.node_refs.push_back(pool.add(p));
    for (long long id : a.node_refs) a.ring.push_back(pool.local(id));
    if (!polygon_is_ccw(a.ring)) {
      std::reverse(a.ring.begin(), a.ring.end());
      std::reverse(a.node_refs.begin(), a.node_refs.end());
    }
    a.bbox = bbox_of(a.ring);
    g.areas.push_back(std::move(a));
  };

  auto add_passage = [&](const std::string& name, const std::string& from,
                         const std::string& to, const std::string& level,
                         const std::vector<Vec2>& pts) {
    Passage p;
    p.way_id = way_id++;
    p.name = name;
    p.from = from;
    p.to = to;
    p.level = level;
    for (const Vec2& q : pts) p.node_refs.push_back(pool.add(q));
    for (long long id : p.node_refs) p.pts.push_back(pool.local(id));
    p.length = polyline_length(p.pts);
    p.center = polyline_midpoint(p.pts);
    g.passages.push_back(std::move(p));
  };

  auto box = [](double x0, double y0, double x1, double y1) {
    return std::vector<Vec2>{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  };

  add_area("campus", AreaType::kStructure, "", "", box(x_min, 0.0, x_max, top_y));

  for (int f = 1; f <= cfg.floors; ++f) {
    const std::string fl = std::to_string(f);
    const std::string floor_name = "F" + fl;
    add_area(floor_name, AreaType::kStructure, "campus", fl,
             box(x_min, 0.0, x_max, top_y));

    for (int s = 1; s <= cfg.sectors; ++s) {
      const std::string sec = floor_name + "_S" + std::to_string(s);
      const std::string cor = floor_name + "_C" + std::to_string(s);
      const double sx0 = (s - 1) * seg_len;
      const double sx1 = s * seg_len;
      add_area(sec, AreaType::kStructure, floor_name, fl, box(sx0, 0.0, sx1, top_y));
      add_area(cor, AreaType::kCorridor, sec, fl, box(sx0, cor_y0, sx1, cor_y1));

      for (int r = 0; r < cfg.rooms_per_side; ++r) {
        const double rx0 = sx0 + r * cfg.room_w;
        const double rx1 = rx0 + cfg.room_w;
        const double slack = 0.5 * (cfg.room_w - cfg.door_w) - 0.5;
        for (int side = 0; side < 2; ++side) {
          const bool below = side == 0;
          const std::string room = sec + (below ? "_Ra" : "_Rb") + std::to_string(r + 1);
          add_area(room, AreaType::kRoom, sec, fl,
                   below ? box(rx0, 0.0, rx1, cor_y0) : box(rx0, cor_y1, rx1, top_y));
          const double door_y = below ? cor_y0 : cor_y1;
          const double cx =
              0.5 * (rx0 + rx1) + (slack > 0.0 ? rand_range(rng, -slack, slack) : 0.0);
          add_passage("d_" + room, room, cor, fl,
                      {{cx - 0.5 * cfg.door_w, door_y}, {cx + 0.5 * cfg.door_w, door_y}});
          ++out.n_doors;
          ++out.n_rooms;
        }
      }
      ++out.n_corridors;

      if (s > 1) {
        const std::string prev = floor_name + "_C" + std::to_string(s - 1);
        // Inset from the corridor corners so the opening does not eat
        // into the room walls that meet the corridor at the same corner.
        add_passage("j_" + floor_name + "_S" + std::to_string(s - 1) + "S" +
                        std::to_string(s),
                    prev, cor, fl, {{sx0, cor_y0 + 0.2}, {sx0, cor_y1 - 0.2}});
        ++out.n_junctions;
      }
    }

    const double mid_y = 0.5 * (cor_y0 + cor_y1);
    if (cfg.with_elevator) {
      const std::string ev = floor_name + "_E";
      add_area(ev, AreaType::kElevator, floor_name, fl,
               box(-cfg.shaft_w, cor_y0, 0.0, cor_y1));
      add_passage("d_" + ev, ev, floor_name + "_C1", fl,
                  {{0.0, mid_y - 0.5 * cfg.door_w}, {0.0, mid_y + 0.5 * cfg.door_w}});
      ++out.n_doors;
    }
    if (cfg.with_stairs) {
      const std::string st = floor_name + "_T";
      add_area(st, AreaType::kStairs, floor_name, fl,
               box(total_len, cor_y0, total_len + cfg.shaft_w, cor_y1));
      add_passage("d_" + st, st, floor_name + "_C" + std::to_string(cfg.sectors), fl,
                  {{total_len, mid_y - 0.5 * cfg.door_w},
                   {total_len, mid_y + 0.5 * cfg.door_w}});
      ++out.n_doors;
    }
    if (f > 1) {
      const std::string below = "F" + std::to_string(f - 1);
      const std::string lv = std::to_string(f - 1) + ";" + fl;
      if (cfg.with_elevator) {
        add_passage("v_E_" + below + floor_name, below + "_E", floor_name + "_E", lv,
                    {{-0.5 * cfg.shaft_w - 0.5, mid_y}, {-0.5 * cfg.shaft_w + 0.5, mid_y}});
        ++out.n_vertical_passages;
      }
      if (cfg.with_stairs) {
        add_passage("v_T_" + below + floor_name, below + "_T", floor_name + "_T", lv,
                    {{total_len + 0.5 * cfg.shaft_w - 0.5, mid_y},
                     {total_len + 0.5 * cfg.shaft_w + 0.5, mid_y}});
        ++out.n_vertical_passages;
      }
    }
  }

  g.nodes = pool.take();
  g.reindex();
  return out;
}

}  // namespace agnav

#endif  // AGNAV_SYNTH_MAP_HPP
