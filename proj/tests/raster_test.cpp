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

#include <cmath>
#include <string>
#include <vector>

#include "agnav/raster.hpp"
#include "test_maps.hpp"

using namespace agnav;
using Catch::Approx;
using agtest::rect;

namespace {

/// Graph assembled in memory with exact coordinates, bypassing the file
/// format so cell-exact expectations are possible.
AreaGraph exact_graph(const std::vector<Area>& areas, const std::vector<Passage>& passages) {
  AreaGraph g;
  g.areas = areas;
  g.passages = passages;
  for (Area& a : g.areas) {
    if (!polygon_is_ccw(a.ring)) std::reverse(a.ring.begin(), a.ring.end());
    a.bbox = bbox_of(a.ring);
  }
  for (Passage& p : g.passages) {
    p.length = polyline_length(p.pts);
    p.center = polyline_midpoint(p.pts);
  }
  g.reindex();
  return g;
}

Area make_area(const std::string& name, AreaType type, const std::vector<Vec2>& ring,
               const std::string& parent = "", const std::string& level = "") {
  Area a;
  a.name = name;
  a.type = type;
  a.ring = ring;
  a.parent = parent;
  a.level = level;
  return a;
}

Passage make_passage(const std::string& name, const std::string& from,
                     const std::string& to, const std::vector<Vec2>& pts,
                     const std::string& level = "") {
  Passage p;
  p.name = name;
  p.from = from;
  p.to = to;
  p.pts = pts;
  p.level = level;
  return p;
}

}  // namespace

TEST_CASE("a 10 m square room rasterizes to the documented cell pattern") {
  AreaGraph g = exact_graph({make_area("R", AreaType::kRoom, rect(0, 0, 10, 10))}, {});
  OccGrid grid = rasterize_leaf(g, "R", 0.1);

  REQUIRE(grid.width == 102);
  REQUIRE(grid.height == 102);
  CHECK(grid.origin.x == Approx(-0.1));
  CHECK(grid.origin.y == Approx(-0.1));

  CHECK(grid.count(CellState::kFree) == 98u * 98u);
  CHECK(grid.count(CellState::kUnknown) == 4u);
  CHECK(grid.count(CellState::kOccupied) == 102u * 102u - 98u * 98u - 4u);

  // The four unknown cells are exactly the grid corners.
  CHECK(grid.at(0, 0) == CellState::kUnknown);
  CHECK(grid.at(0, 101) == CellState::kUnknown);
  CHECK(grid.at(101, 0) == CellState::kUnknown);
  CHECK(grid.at(101, 101) == CellState::kUnknown);
  // A wall on a grid line claims the cells on both sides.
  CHECK(grid.at(0, 50) == CellState::kOccupied);
  CHECK(grid.at(1, 50) == CellState::kOccupied);
  CHECK(grid.at(100, 50) == CellState::kOccupied);
  CHECK(grid.at(101, 50) == CellState::kOccupied);
  CHECK(grid.at(51, 51) == CellState::kFree);
}

TEST_CASE("doorways cut wall cells back to free") {
  AreaGraph g = exact_graph(
      {make_area("A", AreaType::kRoom, rect(0, 0, 10, 10)),
       make_area("B", AreaType::kRoom, rect(10, 0, 20, 10))},
      {make_passage("door", "A", "B", {{10.0, 4.0}, {10.0, 6.0}})});

  BBox box = g.map_bbox();
  OccGrid grid = make_grid_covering(box, 0.1);
  rasterize_into(grid, g, {0, 1}, {0});

  // Wall cells away from the door stay occupied on both sides.
  auto [wx_lo, wy_lo] = grid.world_to_cell({9.95, 2.0});
  CHECK(grid.at(wx_lo, wy_lo) == CellState::kOccupied);
  auto [wx_hi, wy_hi] = grid.world_to_cell({10.05, 2.0});
  CHECK(grid.at(wx_hi, wy_hi) == CellState::kOccupied);
  // Door span is free straight through.
  for (double y : {4.1, 4.5, 5.0, 5.5, 5.9}) {
    auto [ix_l, iy_l] = grid.world_to_cell({9.95, y});
    auto [ix_r, iy_r] = grid.world_to_cell({10.05, y});
    CHECK(grid.at(ix_l, iy_l) == CellState::kFree);
    CHECK(grid.at(ix_r, iy_r) == CellState::kFree);
  }
  // Shared wall survives double drawing of both rooms outside the door.
  auto [ix, iy] = grid.world_to_cell({10.0, 8.0});
  CHECK(grid.at(ix, iy) == CellState::kOccupied);
}

TEST_CASE("leaf rasters from parsed maps include resident doorways") {
  AreaGraph g = parse_osmag(agtest::two_room_map());
  OccGrid grid = rasterize_leaf(g, "R1");
  CHECK(grid.count(CellState::kFree) > 0);
  // Query at the parsed wall coordinate, which file quantization may
  // shift off the nominal y=3 by a few millimetres.
  const double wall_y = g.area("R1").bbox.min.y;
  // d1 spans (2,3)-(3,3) on the wall between R1 and C1.
  auto [ix, iy] = grid.world_to_cell({2.5, wall_y});
  CHECK(grid.at(ix, iy) == CellState::kFree);
  // Far away on the same wall it is solid.
  auto [ox, oy] = grid.world_to_cell({7.0, wall_y});
  CHECK(grid.at(ox, oy) == CellState::kOccupied);
}

TEST_CASE("floor rasters cover every leaf on the level") {
  AreaGraph g = parse_osmag(agtest::two_room_map());
  OccGrid grid = rasterize_floor(g, "1");
  CHECK(grid.count(CellState::kFree) > 0);
  auto [ix, iy] = grid.world_to_cell({15.0, 6.0});  // inside R2
  CHECK(grid.at(ix, iy) == CellState::kFree);
  auto [cx, cy] = grid.world_to_cell({10.0, 1.5});  // inside C1
  CHECK(grid.at(cx, cy) == CellState::kFree);
  CHECK_THROWS_AS(rasterize_floor(g, "99"), UnknownAreaError);
}

TEST_CASE("window size in cells is a constant of the configuration") {
  AreaGraph g = parse_osmag(agtest::two_room_map());
  WindowConfig cfg;
  cfg.size_m = 10.0;
  cfg.resolution = 0.05;
  for (Vec2 c : {Vec2{5.0, 4.0}, Vec2{13.37, 6.123}, Vec2{-20.0, 55.5}}) {
    RollingWindow w = extract_window(g, c, cfg);
    CHECK(w.grid.width == 200);
    CHECK(w.grid.height == 200);
    CHECK(w.grid.cells.size() == 200u * 200u);
    // Origin sits on the global lattice.
    double rx = std::abs(std::remainder(w.grid.origin.x, cfg.resolution));
    double ry = std::abs(std::remainder(w.grid.origin.y, cfg.resolution));
    CHECK(rx < 1e-9);
    CHECK(ry < 1e-9);
  }
  RollingWindow def = extract_window(g, {5.0, 4.0});
  CHECK(def.grid.width == 1000);
  CHECK(def.grid.height == 1000);
}

TEST_CASE("overlapping windows agree cell for cell") {
  AreaGraph g = parse_osmag(agtest::two_room_map());
  WindowConfig cfg;
  cfg.size_m = 12.0;
  cfg.resolution = 0.05;
  RollingWindow wa = extract_window(g, {6.0, 4.0}, cfg);
  RollingWindow wb = extract_window(g, {9.21, 5.07}, cfg);

  int compared = 0, mismatched = 0;
  for (int iy = 0; iy < wa.grid.height; ++iy) {
    for (int ix = 0; ix < wa.grid.width; ++ix) {
      Vec2 c = wa.grid.cell_center(ix, iy);
      auto [bx, by] = wb.grid.world_to_cell(c);
      if (!wb.grid.in_bounds(bx, by)) continue;
      ++compared;
      if (wa.grid.at(ix, iy) != wb.grid.at(bx, by)) ++mismatched;
    }
  }
  CHECK(compared > 10000);
  CHECK(mismatched == 0);
}

TEST_CASE("window retains the areas it drew") {
  AreaGraph g = parse_osmag(agtest::two_room_map());
  WindowConfig cfg;
  cfg.size_m = 8.0;
  cfg.resolution = 0.05;
  RollingWindow w = extract_window(g, {2.0, 5.0}, cfg, "1");
  bool has_r1 = false;
  for (const std::string& n : w.areas) has_r1 |= (n == "R1");
  CHECK(has_r1);
  RollingWindow far = extract_window(g, {500.0, 500.0}, cfg, "1");
  CHECK(far.areas.empty());
  CHECK(far.grid.count(CellState::kUnknown) == far.grid.cells.size());
}

TEST_CASE("pgm export writes top-down binary rows with fixed palette") {
  OccGrid grid;
  grid.width = 3;
  grid.height = 2;
  grid.resolution = 0.5;
  grid.origin = {1.0, 2.0};
  grid.cells = {CellState::kFree, CellState::kOccupied, CellState::kUnknown,   // row y=0
                CellState::kOccupied, CellState::kFree, CellState::kFree};     // row y=1
  std::string bytes = pgm_bytes(grid);
  const std::string header = "P5\n3 2\n255\n";
  REQUIRE(bytes.size() == header.size() + 6);
  CHECK(bytes.substr(0, header.size()) == header);
  const unsigned char* d =
      reinterpret_cast<const unsigned char*>(bytes.data()) + header.size();
  // Top row first: cells (0,1),(1,1),(2,1) then (0,0),(1,0),(2,0).
  CHECK(d[0] == kPgmOccupied);
  CHECK(d[1] == kPgmFree);
  CHECK(d[2] == kPgmFree);
  CHECK(d[3] == kPgmFree);
  CHECK(d[4] == kPgmOccupied);
  CHECK(d[5] == kPgmUnknown);

  std::string yaml = grid_yaml(grid, "map.pgm");
  CHECK(yaml.find("image: map.pgm") != std::string::npos);
  CHECK(yaml.find("resolution: 0.5") != std::string::npos);
  CHECK(yaml.find("origin: [1, 2, 0.0]") != std::string::npos);
}

TEST_CASE("grid cell coordinate round trips") {
  OccGrid grid;
  grid.width = 10;
  grid.height = 10;
  grid.resolution = 0.1;
  grid.origin = {-0.5, -0.5};
  grid.cells.assign(100, CellState::kFree);
  for (int iy = 0; iy < 10; ++iy) {
    for (int ix = 0; ix < 10; ++ix) {
      auto [rx, ry] = grid.world_to_cell(grid.cell_center(ix, iy));
      CHECK(rx == ix);
      CHECK(ry == iy);
    }
  }
  CHECK_FALSE(grid.in_bounds(-1, 0));
  CHECK_FALSE(grid.in_bounds(0, 10));
}
