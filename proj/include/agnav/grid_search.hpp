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
// A* over occupancy grids: 8-connected, diagonal moves cannot cut a
// corner past an occupied orthogonal neighbor, octile heuristic, ties on
// f broken toward larger g. Only free cells are traversable.

#ifndef AGNAV_GRID_SEARCH_HPP
#define AGNAV_GRID_SEARCH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "agnav/raster.hpp"

namespace agnav {

struct GridPath {
  bool found = false;
  double cost = 0.0;                        // metres along cell centers
  std::vector<std::pair<int, int>> cells;   // start to goal inclusive
  int closed_states = 0;                    // pops from the open list
};

/// Free cell closest to \p p, searched ring by ring out to
/// \p max_radius_cells. The first non-empty ring wins and within it the
/// closest cell center; the scan order makes snapping deterministic.
inline std::optional<std::pair<int, int>> nearest_free_cell(const OccGrid& grid,
                                                            const Vec2& p,
                                                            int max_radius_cells = 3) {
  const auto [cx, cy] = grid.world_to_cell(p);
  std::optional<std::pair<int, int>> best;
  double best_d = std::numeric_limits<double>::max();
  for (int r = 0; r <= max_radius_cells; ++r) {
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (std::max(std::abs(dx), std::abs(dy)) != r) continue;  // ring only
        const int ix = cx + dx, iy = cy + dy;
        if (!grid.in_bounds(ix, iy) || grid.at(ix, iy) != CellState::kFree) continue;
        const double d = (grid.cell_center(ix, iy) - p).norm();
        if (d < best_d) {
          best_d = d;
          best = {{ix, iy}};
        }
      }
    }
    if (best) return best;
  }
  return best;
}

inline GridPath grid_astar(const OccGrid& grid, std::pair<int, int> start,
                           std::pair<int, int> goal) {
  GridPath result;
  const int w = grid.width, h = grid.height;
  auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };
  auto free_at = [&](int x, int y) {
    return grid.in_bounds(x, y) && grid.at(x, y) == CellState::kFree;
  };
  if (!free_at(start.first, start.second) || !free_at(goal.first, goal.second)) {
    return result;
  }

  const double res = grid.resolution;
  const double diag = res * std::numbers::sqrt2;
  auto heuristic = [&](int x, int y) {
    const double dx = std::abs(x - goal.first), dy = std::abs(y - goal.second);
    return res * (std::max(dx, dy) + (std::numbers::sqrt2 - 1.0) * std::min(dx, dy));
  };

  struct Entry {
    double f;
    double g;
    int x, y;
  };
  // Smaller f first; on equal f prefer the deeper node (larger g).
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.f != b.f) return a.f > b.f;
    return a.g < b.g;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);

  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> g_cost(n, std::numeric_limits<double>::max());
  std::vector<std::int32_t> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);

  g_cost[idx(start.first, start.second)] = 0.0;
  open.push({heuristic(start.first, start.second), 0.0, start.first, start.second});

  static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

  while (!open.empty()) {
    const Entry cur = open.top();
    open.pop();
    const std::size_t ci = idx(cur.x, cur.y);
    if (closed[ci]) continue;
    closed[ci] = 1;
    ++result.closed_states;
    if (cur.x == goal.first && cur.y == goal.second) {
      result.found = true;
      result.cost = g_cost[ci];
      // Walk parents back to the start.
      int x = cur.x, y = cur.y;
      while (x != start.first || y != start.second) {
        result.cells.emplace_back(x, y);
        const std::int32_t p = parent[idx(x, y)];
        x = p % w;
        y = p / w;
      }
      result.cells.emplace_back(start.first, start.second);
      std::reverse(result.cells.begin(), result.cells.end());
      return result;
    }
    for (int k = 0; k < 8; ++k) {
      const int nx = cur.x + kDx[k], ny = cur.y + kDy[k];
      if (!free_at(nx, ny)) continue;
      const bool diagonal = k >= 4;
      if (diagonal &&
          (!free_at(cur.x + kDx[k], cur.y) || !free_at(cur.x, cur.y + kDy[k]))) {
        continue;  // no slipping between two occupied corners
      }
      const std::size_t ni = idx(nx, ny);
      if (closed[ni]) continue;
      const double ng = g_cost[ci] + (diagonal ? diag : res);
      if (ng < g_cost[ni] - 1e-15) {
        g_cost[ni] = ng;
        parent[ni] = static_cast<std::int32_t>(ci);
        open.push({ng + heuristic(nx, ny), ng, nx, ny});
      }
    }
  }
  return result;
}

/// Cell path converted to world coordinates at cell centers.
inline std::vector<Vec2> cells_to_world(const OccGrid& grid,
                                        const std::vector<std::pair<int, int>>& cells) {
  std::vector<Vec2> out;
  out.reserve(cells.size());
  for (const auto& [x, y] : cells) out.push_back(grid.cell_center(x, y));
  return out;
}

}  // namespace agnav

#endif  // AGNAV_GRID_SEARCH_HPP
