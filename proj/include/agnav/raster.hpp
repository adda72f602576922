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
// On-demand rasterization of the vector map. Cells are classified by a
// fixed convention so that repeated extractions agree cell for cell:
//   free     - the cell center lies strictly inside an area ring
//   occupied - the closed cell square overlaps a wall segment over a
//              positive length (a single corner touch does not count;
//              a wall lying exactly on a grid line claims the cells on
//              both sides)
//   passages re-mark their cells free after walls, cutting doorways
//   everything else stays unknown
// All cell boxes live on the global lattice anchored at the map origin,
// which makes overlapping extractions byte-identical in the overlap.

#ifndef AGNAV_RASTER_HPP
#define AGNAV_RASTER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "agnav/area_graph.hpp"
#include "agnav/errors.hpp"
#include "agnav/geometry.hpp"

namespace agnav {

enum class CellState : std::uint8_t { kUnknown = 0, kFree = 1, kOccupied = 2 };

inline constexpr std::uint8_t kPgmOccupied = 0;
inline constexpr std::uint8_t kPgmUnknown = 205;
inline constexpr std::uint8_t kPgmFree = 254;

/// Default grid resolutions: coarse for planning across a single leaf
/// area, fine for the local navigation window.
inline constexpr double kLeafRasterRes = 0.1;
inline constexpr double kWindowRes = 0.05;
inline constexpr double kWindowSizeM = 50.0;

struct OccGrid {
  int width = 0;
  int height = 0;
  double resolution = kWindowRes;
  Vec2 origin;  // world position of the min corner of cell (0, 0)
  std::vector<CellState> cells;

  bool in_bounds(int ix, int iy) const {
    return ix >= 0 && iy >= 0 && ix < width && iy < height;
  }
  CellState at(int ix, int iy) const { return cells[static_cast<std::size_t>(iy) * width + ix]; }
  void set(int ix, int iy, CellState s) { cells[static_cast<std::size_t>(iy) * width + ix] = s; }

  Vec2 cell_center(int ix, int iy) const {
    return {origin.x + (ix + 0.5) * resolution, origin.y + (iy + 0.5) * resolution};
  }
  std::pair<int, int> world_to_cell(const Vec2& p) const {
    return {static_cast<int>(std::floor((p.x - origin.x) / resolution)),
            static_cast<int>(std::floor((p.y - origin.y) / resolution))};
  }

  std::size_t count(CellState s) const {
    return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), s));
  }
  double free_area_m2() const { return count(CellState::kFree) * resolution * resolution; }
  std::size_t byte_size() const { return cells.size(); }
};

namespace detail {

/// Largest lattice multiple of res not above v (tolerant of float noise
/// when v already sits on the lattice).
inline double snap_down(double v, double res) {
  return std::floor(v / res + 1e-9) * res;
}

/// Length of segment [p,q] clipped to the closed box [lo,hi], epsilon
/// padded so walls lying exactly on a cell edge register on both sides.
inline double segment_length_in_box(const Vec2& p, const Vec2& q, const Vec2& lo,
                                    const Vec2& hi) {
  constexpr double kPad = 1e-9;
  const Vec2 d = q - p;
  double t0 = 0.0, t1 = 1.0;
  if (std::abs(d.x) < 1e-15) {
    if (p.x < lo.x - kPad || p.x > hi.x + kPad) return 0.0;
  } else {
    double ta = (lo.x - kPad - p.x) / d.x;
    double tb = (hi.x + kPad - p.x) / d.x;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (std::abs(d.y) < 1e-15) {
    if (p.y < lo.y - kPad || p.y > hi.y + kPad) return 0.0;
  } else {
    double ta = (lo.y - kPad - p.y) / d.y;
    double tb = (hi.y + kPad - p.y) / d.y;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t1 <= t0) return 0.0;
  return (t1 - t0) * d.norm();
}

/// Marks every cell whose closed square overlaps [a,b] over a positive
/// length. Walks the segment at half-cell steps and probes the 3x3 cell
/// neighborhood of each sample, which covers all candidate cells.
inline void mark_segment(OccGrid& grid, const Vec2& a, const Vec2& b, CellState state) {
  constexpr double kMinOverlap = 1e-7;  // rejects single-point corner touches
  const double len = (b - a).norm();
  const double res = grid.resolution;
  const int steps = std::max(1, static_cast<int>(std::ceil(len / (0.5 * res))));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const Vec2 s = a + (b - a) * t;
    const auto [cx, cy] = grid.world_to_cell(s);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int ix = cx + dx, iy = cy + dy;
        if (!grid.in_bounds(ix, iy) || grid.at(ix, iy) == state) continue;
        const Vec2 lo{grid.origin.x + ix * res, grid.origin.y + iy * res};
        const Vec2 hi{lo.x + res, lo.y + res};
        if (segment_length_in_box(a, b, lo, hi) > kMinOverlap) grid.set(ix, iy, state);
      }
    }
  }
}

}  // namespace detail

/// Free interior: cells whose center lies strictly inside the ring.
inline void mark_interior_free(OccGrid& grid, const std::vector<Vec2>& ring) {
  const BBox box = bbox_of(ring);
  const auto [x0, y0] = grid.world_to_cell(box.min);
  const auto [x1, y1] = grid.world_to_cell(box.max);
  for (int iy = std::max(0, y0); iy <= std::min(grid.height - 1, y1); ++iy) {
    for (int ix = std::max(0, x0); ix <= std::min(grid.width - 1, x1); ++ix) {
      if (point_in_polygon(ring, grid.cell_center(ix, iy))) {
        grid.set(ix, iy, CellState::kFree);
      }
    }
  }
}

inline void mark_ring_occupied(OccGrid& grid, const std::vector<Vec2>& ring) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    detail::mark_segment(grid, ring[i], ring[(i + 1) % n], CellState::kOccupied);
  }
}

inline void mark_polyline_free(OccGrid& grid, const std::vector<Vec2>& pts) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    detail::mark_segment(grid, pts[i - 1], pts[i], CellState::kFree);
  }
}

/// Fresh grid on the global lattice covering \p box plus one cell of
/// margin on every side.
inline OccGrid make_grid_covering(const BBox& box, double res) {
  OccGrid grid;
  grid.resolution = res;
  grid.origin = {detail::snap_down(box.min.x, res) - res,
                 detail::snap_down(box.min.y, res) - res};
  grid.width = static_cast<int>(std::ceil((box.max.x - grid.origin.x) / res - 1e-9)) + 1;
  grid.height = static_cast<int>(std::ceil((box.max.y - grid.origin.y) / res - 1e-9)) + 1;
  grid.cells.assign(static_cast<std::size_t>(grid.width) * grid.height,
                    CellState::kUnknown);
  return grid;
}

/// Rasterizes a set of areas and passages into \p grid: first all
/// interiors, then all walls, then doorways. The phase order keeps a
/// shared wall solid even when both rooms are drawn.
inline void rasterize_into(OccGrid& grid, const AreaGraph& g,
                           const std::vector<int>& area_idxs,
                           const std::vector<int>& passage_idxs) {
  for (int i : area_idxs) mark_interior_free(grid, g.areas[i].ring);
  for (int i : area_idxs) mark_ring_occupied(grid, g.areas[i].ring);
  for (int i : passage_idxs) mark_polyline_free(grid, g.passages[i].pts);
}

/// Grid for one leaf area with its resident passages cut through the
/// walls. A 10 m x 10 m room at 0.1 m resolution yields a 102x102 grid
/// whose interior is a 98x98 block of free cells.
inline OccGrid rasterize_leaf(const AreaGraph& g, const std::string& leaf_name,
                              double res = kLeafRasterRes) {
  const Area& leaf = g.area(leaf_name);
  BBox box = leaf.bbox;
  std::vector<int> pass = g.passages_in(leaf_name);
  for (int i : pass) {
    for (const Vec2& p : g.passages[i].pts) box.expand(p);
  }
  OccGrid grid = make_grid_covering(box, res);
  std::vector<int> own{g.area_index.at(leaf_name)};
  rasterize_into(grid, g, own, pass);
  return grid;
}

namespace detail {

inline bool passage_on_level(const Passage& p, const std::string& level) {
  if (level.empty() || p.level.empty() || p.level == level) return true;
  // Multi-floor connections carry labels like "2;3".
  std::stringstream ss(p.level);
  std::string tok;
  while (std::getline(ss, tok, ';')) {
    if (tok == level) return true;
  }
  return false;
}

/// Leaf areas and passages whose padded boxes overlap \p box. The pad
/// accounts for wall marks spilling one cell beyond the geometry, so two
/// extractions agree wherever their grids overlap.
inline void collect_in_box(const AreaGraph& g, const BBox& box, const std::string& level,
                           double res, std::vector<int>& area_idxs,
                           std::vector<int>& passage_idxs) {
  const double pad = 2.0 * res;
  for (int i = 0; i < static_cast<int>(g.areas.size()); ++i) {
    const Area& a = g.areas[i];
    if (!g.is_leaf(a)) continue;
    if (!level.empty() && a.level != level) continue;
    BBox ab = a.bbox;
    ab.pad(pad);
    if (ab.intersects(box)) area_idxs.push_back(i);
  }
  for (int i = 0; i < static_cast<int>(g.passages.size()); ++i) {
    const Passage& p = g.passages[i];
    if (!passage_on_level(p, level)) continue;
    BBox pb = bbox_of(p.pts);
    pb.pad(pad);
    if (pb.intersects(box)) passage_idxs.push_back(i);
  }
}

}  // namespace detail

/// Full-floor raster: all leaves carrying \p level (every leaf when the
/// label is empty) plus their doorways.
inline OccGrid rasterize_floor(const AreaGraph& g, const std::string& level,
                               double res = kLeafRasterRes) {
  BBox box;
  for (const Area& a : g.areas) {
    if (!g.is_leaf(a)) continue;
    if (!level.empty() && a.level != level) continue;
    box.expand(a.bbox);
  }
  if (!box.valid()) throw UnknownAreaError("no leaf areas on level '" + level + "'");
  OccGrid grid = make_grid_covering(box, res);
  std::vector<int> area_idxs, passage_idxs;
  detail::collect_in_box(g, box, level, res, area_idxs, passage_idxs);
  rasterize_into(grid, g, area_idxs, passage_idxs);
  return grid;
}

struct WindowConfig {
  double size_m = kWindowSizeM;
  double resolution = kWindowRes;
};

struct RollingWindow {
  OccGrid grid;
  Vec2 requested_center;
  std::vector<std::string> areas;     // leaf areas drawn into the window
  std::vector<std::string> passages;  // doorways drawn into the window
};

/// Fixed-size local window around \p center. The cell count depends only
/// on the configuration, never on the content, and the origin snaps to
/// the global lattice so successive windows agree on shared cells.
inline RollingWindow extract_window(const AreaGraph& g, const Vec2& center,
                                    const WindowConfig& cfg = {},
                                    const std::string& level = "") {
  RollingWindow win;
  win.requested_center = center;
  const double res = cfg.resolution;
  const int n = static_cast<int>(std::llround(cfg.size_m / res));
  win.grid.resolution = res;
  win.grid.width = n;
  win.grid.height = n;
  win.grid.origin = {detail::snap_down(center.x - 0.5 * cfg.size_m, res),
                     detail::snap_down(center.y - 0.5 * cfg.size_m, res)};
  win.grid.cells.assign(static_cast<std::size_t>(n) * n, CellState::kUnknown);

  BBox box;
  box.expand(win.grid.origin);
  box.expand({win.grid.origin.x + n * res, win.grid.origin.y + n * res});
  std::vector<int> area_idxs, passage_idxs;
  detail::collect_in_box(g, box, level, res, area_idxs, passage_idxs);
  rasterize_into(win.grid, g, area_idxs, passage_idxs);
  for (int i : area_idxs) win.areas.push_back(g.areas[i].name);
  for (int i : passage_idxs) win.passages.push_back(g.passages[i].name);
  return win;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

/// Binary PGM, rows written north to south (max y first).
inline std::string pgm_bytes(const OccGrid& grid) {
  std::ostringstream out;
  out << "P5\n" << grid.width << " " << grid.height << "\n255\n";
  for (int iy = grid.height - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < grid.width; ++ix) {
      std::uint8_t v = kPgmUnknown;
      switch (grid.at(ix, iy)) {
        case CellState::kFree: v = kPgmFree; break;
        case CellState::kOccupied: v = kPgmOccupied; break;
        case CellState::kUnknown: v = kPgmUnknown; break;
      }
      out.put(static_cast<char>(v));
    }
  }
  return out.str();
}

inline void write_pgm(const OccGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write pgm file: " + path);
  out << pgm_bytes(grid);
}

/// Companion metadata in the common map-server layout.
inline std::string grid_yaml(const OccGrid& grid, const std::string& image_name) {
  std::ostringstream out;
  out << "image: " << image_name << "\n";
  out << "resolution: " << grid.resolution << "\n";
  out << "origin: [" << grid.origin.x << ", " << grid.origin.y << ", 0.0]\n";
  out << "negate: 0\noccupied_thresh: 0.65\nfree_thresh: 0.196\n";
  return out.str();
}

inline void write_grid_yaml(const OccGrid& grid, const std::string& image_name,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write yaml file: " + path);
  out << grid_yaml(grid, image_name);
}

}  // namespace agnav

#endif  // AGNAV_RASTER_HPP
