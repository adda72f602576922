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

#include <catch2/catch_amalgamated.hpp>

#include "agnav/grid_search.hpp"
#include "agnav/raster.hpp"
#include "agnav/synth_map.hpp"
#include "agnav/validation.hpp"

using namespace agnav;

TEST_CASE("generated campus satisfies every map invariant") {
  Campus c = generate_campus();
  ValidationReport rep = validate(c.graph);
  for (const Violation& v : rep.violations) {
    INFO(to_string(v.invariant) << " " << v.subject << ": " << v.detail);
    CHECK(false);
  }
  REQUIRE(rep.ok());
}

TEST_CASE("campus element counts follow the configuration") {
  CampusConfig cfg;
  cfg.floors = 2;
  cfg.sectors = 3;
  cfg.rooms_per_side = 4;
  Campus c = generate_campus(cfg);

  CHECK(c.n_rooms == 2 * 3 * 4 * 2);
  CHECK(c.n_corridors == 2 * 3);
  CHECK(c.n_junctions == 2 * (3 - 1));
  CHECK(c.n_vertical_passages == (2 - 1) * 2);
  CHECK(c.n_doors == c.n_rooms + 2 * 2);  // one room door each, plus shaft doors

  const AreaGraph& g = c.graph;
  // campus + floors + (sector + corridor + rooms) per floor + shafts
  const int expect_areas = 1 + 2 * (1 + 3 * (2 + 8) + 2);
  CHECK(static_cast<int>(g.areas.size()) == expect_areas);
  CHECK(static_cast<int>(g.passages.size()) ==
        c.n_doors + c.n_junctions + c.n_vertical_passages);
}

TEST_CASE("campus generation is deterministic in the seed") {
  CampusConfig cfg;
  cfg.seed = 7;
  const std::string a = write_osmag(generate_campus(cfg).graph);
  const std::string b = write_osmag(generate_campus(cfg).graph);
  CHECK(a == b);

  cfg.seed = 8;
  const std::string other = write_osmag(generate_campus(cfg).graph);
  CHECK(a != other);
}

TEST_CASE("campus survives a save and load round trip unchanged") {
  Campus c = generate_campus();
  const std::string xml = write_osmag(c.graph);
  AreaGraph back = parse_osmag(xml);
  CHECK(content_hash(back) == content_hash(c.graph));
  CHECK(write_osmag(back) == xml);
  CHECK(back.areas.size() == c.graph.areas.size());
  CHECK(back.passages.size() == c.graph.passages.size());
}

TEST_CASE("campus hierarchy has the expected shape") {
  Campus c = generate_campus();
  const AreaGraph& g = c.graph;

  CHECK(g.max_depth() == 3);
  CHECK(g.depth("campus") == 0);
  CHECK(g.depth("F2") == 1);
  CHECK(g.depth("F2_S3") == 2);
  CHECK(g.depth("F2_S3_Ra1") == 3);
  CHECK(g.depth("F2_E") == 2);  // shafts hang off the floor directly

  CHECK(g.lca("F1_S1_Ra1", "F1_S1_Rb2") == "F1_S1");
  CHECK(g.lca("F1_S1_Ra1", "F1_S4_Ra1") == "F1");
  CHECK(g.lca("F1_S1_Ra1", "F3_S1_Ra1") == "campus");

  CHECK(g.area("campus").is_structure());
  CHECK(g.area("F1").is_structure());
  CHECK(g.area("F1_S2").is_structure());
  CHECK(g.area("F1_C2").type == AreaType::kCorridor);
  CHECK(g.area("F1_E").is_vertical());
  CHECK(g.area("F2_T").is_vertical());
  for (int leaf : g.leaf_indices()) {
    CHECK_FALSE(g.areas[leaf].is_structure());
  }
}

TEST_CASE("campus passages connect the areas they claim") {
  Campus c = generate_campus();
  const AreaGraph& g = c.graph;

  const Passage& door = g.passage("d_F1_S1_Ra1");
  CHECK(door.from == "F1_S1_Ra1");
  CHECK(door.to == "F1_C1");
  CHECK(door.level == "1");
  CHECK(door.length == Catch::Approx(1.0).margin(0.01));

  const Passage& junction = g.passage("j_F2_S1S2");
  CHECK(junction.from == "F2_C1");
  CHECK(junction.to == "F2_C2");

  const Passage& lift = g.passage("v_E_F1F2");
  CHECK(lift.from == "F1_E");
  CHECK(lift.to == "F2_E");
  CHECK(lift.level == "1;2");
  // The crossing point sits inside both shaft footprints.
  CHECK(point_in_polygon(g.area("F1_E").ring, lift.center));
  CHECK(point_in_polygon(g.area("F2_E").ring, lift.center));
}

TEST_CASE("a generated floor is traversable end to end on its raster") {
  Campus c = generate_campus();
  OccGrid grid = rasterize_floor(c.graph, "1", 0.1);

  // Room centers at opposite ends of the floor; the only way between
  // them runs door, corridor, junctions, corridor, door.
  const Vec2 a = c.graph.area("F1_S1_Ra1").centroid();
  const Vec2 b = c.graph.area("F1_S4_Rb5").centroid();
  auto ca = nearest_free_cell(grid, a, 3);
  auto cb = nearest_free_cell(grid, b, 3);
  REQUIRE(ca);
  REQUIRE(cb);
  GridPath path = grid_astar(grid, *ca, *cb);
  REQUIRE(path.found);
  // Never shorter than the straight line, never wildly longer.
  const double euclid = (b - a).norm();
  CHECK(path.cost >= euclid - 0.2);
  CHECK(path.cost < 3.0 * euclid);
}

TEST_CASE("rooms on a floor raster are sealed except at their door") {
  Campus c = generate_campus();
  OccGrid grid = rasterize_floor(c.graph, "2", 0.1);

  // Walk the full wall of one room and count free crossings: only the
  // door span may be open.
  const Area& room = c.graph.area("F2_S2_Ra3");
  const Passage& door = c.graph.passage("d_F2_S2_Ra3");
  const BBox& bb = room.bbox;
  int open = 0, total = 0;
  for (double x = bb.min.x + 0.05; x < bb.max.x; x += 0.1) {
    for (double y : {bb.min.y, bb.max.y}) {
      auto [ix, iy] = grid.world_to_cell({x, y});
      if (!grid.in_bounds(ix, iy)) continue;
      ++total;
      if (grid.at(ix, iy) == CellState::kFree) ++open;
    }
  }
  for (double y = bb.min.y + 0.05; y < bb.max.y; y += 0.1) {
    for (double x : {bb.min.x, bb.max.x}) {
      auto [ix, iy] = grid.world_to_cell({x, y});
      if (!grid.in_bounds(ix, iy)) continue;
      ++total;
      if (grid.at(ix, iy) == CellState::kFree) ++open;
    }
  }
  CHECK(total > 200);
  // Door is 1 m wide; allow the neighbouring cell on each side.
  CHECK(open >= 8);
  CHECK(open <= 14);
  CHECK(distance_to_polygon_boundary(room.ring, door.center) < 0.01);
}

TEST_CASE("campus respects disabled shafts") {
  CampusConfig cfg;
  cfg.floors = 2;
  cfg.with_elevator = false;
  cfg.with_stairs = false;
  Campus c = generate_campus(cfg);
  CHECK(c.n_vertical_passages == 0);
  CHECK_FALSE(c.graph.find_area("F1_E"));
  CHECK_FALSE(c.graph.find_area("F1_T"));
  CHECK(validate(c.graph).ok());
}
