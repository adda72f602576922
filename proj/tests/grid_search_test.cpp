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
#include <queue>
#include <random>
#include <vector>

#include "agnav/grid_search.hpp"

using namespace agnav;
using Catch::Approx;

namespace {

OccGrid blank_grid(int w, int h, double res = 0.1) {
  OccGrid g;
  g.width = w;
  g.height = h;
  g.resolution = res;
  g.origin = {0.0, 0.0};
  g.cells.assign(static_cast<std::size_t>(w) * h, CellState::kFree);
  return g;
}

/// Reference shortest path cost by plain Dijkstra, written without any of
/// the A* machinery. Same movement rules: 8 neighbors, no corner cutting.
double dijkstra_cost(const OccGrid& g, std::pair<int, int> s, std::pair<int, int> t,
                     bool& found) {
  found = false;
  auto free_at = [&](int x, int y) {
    return g.in_bounds(x, y) && g.at(x, y) == CellState::kFree;
  };
  if (!free_at(s.first, s.second) || !free_at(t.first, t.second)) return 0.0;
  const std::size_t n = static_cast<std::size_t>(g.width) * g.height;
  std::vector<double> dist(n, 1e300);
  using QE = std::pair<double, std::size_t>;
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
  auto id = [&](int x, int y) { return static_cast<std::size_t>(y) * g.width + x; };
  dist[id(s.first, s.second)] = 0.0;
  pq.push({0.0, id(s.first, s.second)});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u] + 1e-12) continue;
    int ux = static_cast<int>(u) % g.width, uy = static_cast<int>(u) / g.width;
    if (ux == t.first && uy == t.second) {
      found = true;
      return d;
    }
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        int vx = ux + dx, vy = uy + dy;
        if (!free_at(vx, vy)) continue;
        if (dx != 0 && dy != 0 && (!free_at(ux + dx, uy) || !free_at(ux, uy + dy)))
          continue;
        double w = (dx != 0 && dy != 0) ? g.resolution * std::numbers::sqrt2
                                        : g.resolution;
        if (dist[u] + w < dist[id(vx, vy)] - 1e-12) {
          dist[id(vx, vy)] = dist[u] + w;
          pq.push({dist[id(vx, vy)], id(vx, vy)});
        }
      }
    }
  }
  return 0.0;
}

bool path_is_valid(const OccGrid& g, const GridPath& p, std::pair<int, int> s,
                   std::pair<int, int> t) {
  if (p.cells.empty() || p.cells.front() != s || p.cells.back() != t) return false;
  double cost = 0.0;
  for (std::size_t i = 0; i < p.cells.size(); ++i) {
    auto [x, y] = p.cells[i];
    if (g.at(x, y) != CellState::kFree) return false;
    if (i == 0) continue;
    auto [px, py] = p.cells[i - 1];
    int dx = x - px, dy = y - py;
    if (std::abs(dx) > 1 || std::abs(dy) > 1 || (dx == 0 && dy == 0)) return false;
    if (dx != 0 && dy != 0) {
      if (g.at(px + dx, py) != CellState::kFree || g.at(px, py + dy) != CellState::kFree)
        return false;
      cost += g.resolution * std::numbers::sqrt2;
    } else {
      cost += g.resolution;
    }
  }
  return std::abs(cost - p.cost) < 1e-9;
}

}  // namespace

TEST_CASE("straight and diagonal runs cost exactly what they should") {
  OccGrid g = blank_grid(20, 20);
  GridPath straight = grid_astar(g, {2, 3}, {12, 3});
  REQUIRE(straight.found);
  CHECK(straight.cost == Approx(10 * 0.1));
  CHECK(straight.cells.size() == 11);

  GridPath diag = grid_astar(g, {2, 2}, {9, 9});
  REQUIRE(diag.found);
  CHECK(diag.cost == Approx(7 * 0.1 * std::numbers::sqrt2));

  GridPath mixed = grid_astar(g, {0, 0}, {10, 4});
  REQUIRE(mixed.found);
  CHECK(mixed.cost == Approx(0.1 * (6 + 4 * std::numbers::sqrt2)));
}

TEST_CASE("start equals goal and unreachable goals") {
  OccGrid g = blank_grid(8, 8);
  GridPath same = grid_astar(g, {3, 3}, {3, 3});
  REQUIRE(same.found);
  CHECK(same.cost == 0.0);
  CHECK(same.cells.size() == 1);

  for (int y = 0; y < 8; ++y) g.set(4, y, CellState::kOccupied);
  GridPath blocked = grid_astar(g, {1, 1}, {6, 6});
  CHECK_FALSE(blocked.found);

  g.set(1, 1, CellState::kOccupied);
  CHECK_FALSE(grid_astar(g, {1, 1}, {2, 2}).found);
  // Unknown cells are not traversable either.
  OccGrid u = blank_grid(8, 8);
  u.set(6, 6, CellState::kUnknown);
  CHECK_FALSE(grid_astar(u, {1, 1}, {6, 6}).found);
}

TEST_CASE("diagonal moves cannot slip between touching corners") {
  OccGrid g = blank_grid(2, 2);
  g.set(1, 0, CellState::kOccupied);
  g.set(0, 1, CellState::kOccupied);
  CHECK_FALSE(grid_astar(g, {0, 0}, {1, 1}).found);

  // Going around a single blocked cell cannot use diagonals either,
  // since both would brush the obstacle corner: four straight steps.
  OccGrid h = blank_grid(3, 3);
  h.set(1, 0, CellState::kOccupied);
  GridPath p = grid_astar(h, {0, 0}, {2, 0});
  REQUIRE(p.found);
  CHECK(p.cost == Approx(0.4));
}

TEST_CASE("search matches an independent dijkstra on random grids") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int solved = 0;
  for (int round = 0; round < 80; ++round) {
    OccGrid g = blank_grid(64, 64);
    double density = 0.1 + 0.25 * u01(rng);
    for (auto& c : g.cells) {
      double r = u01(rng);
      if (r < density) c = CellState::kOccupied;
      else if (r < density + 0.05) c = CellState::kUnknown;
    }
    std::uniform_int_distribution<int> pick(0, 63);
    std::pair<int, int> s{pick(rng), pick(rng)}, t{pick(rng), pick(rng)};
    g.set(s.first, s.second, CellState::kFree);
    g.set(t.first, t.second, CellState::kFree);

    bool oracle_found = false;
    double oracle = dijkstra_cost(g, s, t, oracle_found);
    GridPath got = grid_astar(g, s, t);
    REQUIRE(got.found == oracle_found);
    if (oracle_found) {
      ++solved;
      CHECK(got.cost == Approx(oracle).margin(1e-9));
      CHECK(path_is_valid(g, got, s, t));
    }
  }
  CHECK(solved > 20);  // the comparison must not be vacuous
}

TEST_CASE("heuristic focus keeps expansions near the corridor of travel") {
  OccGrid g = blank_grid(64, 64);
  GridPath p = grid_astar(g, {2, 2}, {60, 60});
  REQUIRE(p.found);
  // Diagonal run on an empty grid: with an octile heuristic and ties
  // broken toward larger g the frontier hugs the straight line.
  CHECK(p.closed_states < 3 * static_cast<int>(p.cells.size()));
}

TEST_CASE("nearest free cell snaps deterministically") {
  OccGrid g = blank_grid(10, 10);
  g.set(5, 5, CellState::kOccupied);
  auto hit = nearest_free_cell(g, g.cell_center(5, 5), 3);
  REQUIRE(hit.has_value());
  CHECK(g.at(hit->first, hit->second) == CellState::kFree);
  CHECK(std::max(std::abs(hit->first - 5), std::abs(hit->second - 5)) == 1);

  auto self = nearest_free_cell(g, g.cell_center(2, 2), 3);
  REQUIRE(self.has_value());
  CHECK(*self == std::make_pair(2, 2));

  OccGrid all = blank_grid(9, 9);
  for (auto& c : all.cells) c = CellState::kOccupied;
  CHECK_FALSE(nearest_free_cell(all, all.cell_center(4, 4), 3).has_value());

  // Identical query twice gives the identical cell.
  OccGrid r = blank_grid(10, 10);
  r.set(4, 4, CellState::kOccupied);
  r.set(5, 4, CellState::kOccupied);
  Vec2 q = r.cell_center(4, 4) + Vec2{0.01, 0.02};
  auto a = nearest_free_cell(r, q, 3);
  auto b = nearest_free_cell(r, q, 3);
  REQUIRE(a.has_value());
  CHECK(*a == *b);
}

TEST_CASE("world path follows cell centers") {
  OccGrid g = blank_grid(10, 10, 0.5);
  GridPath p = grid_astar(g, {1, 1}, {4, 1});
  REQUIRE(p.found);
  std::vector<Vec2> w = cells_to_world(g, p.cells);
  REQUIRE(w.size() == p.cells.size());
  CHECK(w.front() == g.cell_center(1, 1));
  CHECK(w.back() == g.cell_center(4, 1));
  CHECK(polyline_length(w) == Approx(p.cost));
}
