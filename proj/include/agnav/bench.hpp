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
// Planner benchmark harness: seeded start/goal query sets, a monolithic
// full-floor Grid A* baseline, timed replays under shuffled execution
// orders with case-level medians, the paired cached/uncached ablation of
// the hierarchical shortcut cache, and the storage-footprint report.
// Timing always excludes map parsing and includes virtual-passage
// injection; non-timing outputs (cost, hops, closed states) must be
// identical across execution orders.

#ifndef AGNAV_BENCH_HPP
#define AGNAV_BENCH_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "agnav/area_graph.hpp"
#include "agnav/errors.hpp"
#include "agnav/geometry.hpp"
#include "agnav/grid_search.hpp"
#include "agnav/hier_planner.hpp"
#include "agnav/passage_graph.hpp"
#include "agnav/raster.hpp"
#include "agnav/rng.hpp"

namespace agnav {

// ---------------------------------------------------------------------------
// Query sets

enum class QueryBucket : std::uint8_t { kShort, kMedium, kLong, kCrossFloor };

inline const char* to_string(QueryBucket b) {
  switch (b) {
    case QueryBucket::kShort: return "short";
    case QueryBucket::kMedium: return "medium";
    case QueryBucket::kLong: return "long";
    case QueryBucket::kCrossFloor: return "cross_floor";
  }
  return "?";
}

/// Buckets follow the passage-chain hop count of the reference flat plan;
/// same-leaf routes count as zero hops and land in the short bucket.
inline QueryBucket bucket_from_hops(int hops, bool cross_floor) {
  if (cross_floor) return QueryBucket::kCrossFloor;
  if (hops <= 3) return QueryBucket::kShort;
  if (hops <= 6) return QueryBucket::kMedium;
  return QueryBucket::kLong;
}

struct BenchQuery {
  int id = 0;
  Vec2 start;
  Vec2 goal;
  std::string start_level;
  std::string goal_level;
  std::string start_leaf;
  std::string goal_leaf;
  QueryBucket bucket = QueryBucket::kShort;
  int hops = 0;         // hop count of the reference flat plan
  double ref_cost = 0;  // cost of the reference flat plan

  PlanQuery plan_query() const {
    PlanQuery q;
    q.start = start;
    q.goal = goal;
    q.start_level = start_level;
    q.goal_level = goal_level;
    q.start_leaf = start_leaf;
    q.goal_leaf = goal_leaf;
    return q;
  }
};

using QuerySet = std::vector<BenchQuery>;

struct QuerySetConfig {
  int count = 100;
  std::uint64_t seed = 1;
  double cross_floor_fraction = 0.2;  // ignored on single-level maps
  double margin = 0.3;                // endpoint clearance from area walls
  double min_separation = 1.0;        // same-floor start-goal distance
  int attempts = 200;                 // resamples before SpecInfeasible
};

namespace detail {

/// Uniform point inside the ring with wall clearance; falls back to the
/// centroid when rejection sampling starves (thin or margin-dominated areas).
inline Vec2 sample_point_in_ring(const std::vector<Vec2>& ring, const BBox& box,
                                 double margin, std::mt19937_64& rng) {
  for (int t = 0; t < 64; ++t) {
    const Vec2 p{rand_range(rng, box.min.x, box.max.x),
                 rand_range(rng, box.min.y, box.max.y)};
    if (!point_strictly_in_polygon(ring, p, 1e-9)) continue;
    if (distance_to_polygon_boundary(ring, p) < margin) continue;
    return p;
  }
  return polygon_centroid(ring);
}

inline double path_arclength(const std::vector<Vec2>& pts) {
  double s = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) s += (pts[i] - pts[i - 1]).norm();
  return s;
}

using BenchClock = std::chrono::steady_clock;

inline std::int64_t us_between(BenchClock::time_point a, BenchClock::time_point b) {
  return std::chrono::duration_cast<std::chrono::microseconds>(b - a).count();
}

inline std::int64_t median_us(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0;
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

}  // namespace detail

/// Seeded random query set over the map's horizontal leaf areas. Endpoints
/// are sampled inside rooms and corridors (never structure or shaft leaves),
/// each query is verified routable with the flat planner, and its bucket is
/// assigned from that reference plan.
inline QuerySet generate_queries(PassageGraph& pg, const QuerySetConfig& cfg = {}) {
  const AreaGraph& g = pg.map();
  Planner planner(pg);

  std::vector<const Area*> pool;
  std::set<std::string> levels;
  for (const Area& a : g.areas) {
    if (!g.is_leaf(a) || a.is_structure() || a.is_vertical()) continue;
    pool.push_back(&a);
    levels.insert(a.level);
  }
  if (pool.empty()) throw UnknownAreaError("map has no horizontal leaf areas");

  std::mt19937_64 rng(cfg.seed);
  QuerySet out;
  out.reserve(static_cast<std::size_t>(cfg.count));
  for (int qi = 0; qi < cfg.count; ++qi) {
    bool made = false;
    for (int attempt = 0; attempt < cfg.attempts && !made; ++attempt) {
      const bool want_cross =
          levels.size() > 1 && rand_unit(rng) < cfg.cross_floor_fraction;
      const Area* sa = pool[static_cast<std::size_t>(rand_int(
          rng, 0, static_cast<int>(pool.size()) - 1))];
      const Area* ga = pool[static_cast<std::size_t>(rand_int(
          rng, 0, static_cast<int>(pool.size()) - 1))];
      if (want_cross == (sa->level == ga->level)) continue;

      BenchQuery q;
      q.id = qi;
      q.start = detail::sample_point_in_ring(sa->ring, sa->bbox, cfg.margin, rng);
      q.goal = detail::sample_point_in_ring(ga->ring, ga->bbox, cfg.margin, rng);
      q.start_level = sa->level;
      q.goal_level = ga->level;
      q.start_leaf = sa->name;
      q.goal_leaf = ga->name;
      if (!want_cross && (q.goal - q.start).norm() < cfg.min_separation) continue;

      const PlanResult ref = planner.plan_flat(q.plan_query());
      if (!ref.success) continue;
      q.hops = std::max(0, static_cast<int>(ref.passages.size()) - 1);
      q.ref_cost = ref.cost;
      q.bucket = bucket_from_hops(q.hops, q.start_level != q.goal_level);
      out.push_back(std::move(q));
      made = true;
    }
    if (!made) {
      throw Error("query generation starved after " + std::to_string(cfg.attempts) +
                  " attempts; map may be mostly disconnected");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid A* baseline

struct GridBaselineResult {
  bool success = false;
  std::string failure;
  double cost = 0.0;
  int closed_states = 0;
  std::vector<Vec2> path;  // cell centers, snapped start to snapped goal
};

/// Monolithic baseline: the whole floor rasterized at \p resolution and
/// searched with Grid A*. Deliberately ignores the hierarchy and pays the
/// full-floor memory cost; cross-floor queries are out of its model.
inline GridBaselineResult grid_astar_baseline(const AreaGraph& g, const PlanQuery& q,
                                              double resolution = 0.05,
                                              const OccGrid* prebuilt = nullptr) {
  if (q.start_level != q.goal_level) {
    throw CrossFloorUnsupportedError("grid baseline got levels '" + q.start_level +
                                     "' and '" + q.goal_level + "'");
  }
  OccGrid local;
  const OccGrid* grid = prebuilt;
  if (!grid) {
    local = rasterize_floor(g, q.start_level, resolution);
    grid = &local;
  }

  GridBaselineResult out;
  // Sampled endpoints sit at least a margin inside their area, but the wall
  // band eats one cell ring; search a few rings out for the snap.
  const int snap_r = std::max(3, static_cast<int>(std::lround(0.3 / grid->resolution)));
  const auto s = nearest_free_cell(*grid, q.start, snap_r);
  const auto t = nearest_free_cell(*grid, q.goal, snap_r);
  if (!s || !t) {
    out.failure = "endpoint is not near free space at this resolution";
    return out;
  }
  const GridPath path = grid_astar(*grid, *s, *t);
  out.closed_states = path.closed_states;
  if (!path.found) {
    out.failure = "no grid route";
    return out;
  }
  out.success = true;
  out.cost = path.cost;
  out.path.reserve(path.cells.size());
  for (const auto& [ix, iy] : path.cells) out.path.push_back(grid->cell_center(ix, iy));
  return out;
}

// ---------------------------------------------------------------------------
// Benchmark

struct PlannerCaseStats {
  bool success = false;
  std::string failure;
  double cost = 0.0;
  double arclength = 0.0;  // dense path, meters
  int hops = 0;
  int closed_states = 0;
  bool used_fallback = false;
  bool deterministic = true;  // cost/closed states agreed across orders
  std::vector<std::int64_t> times_us;  // one entry per execution order
  std::int64_t median_us = 0;
  std::optional<double> overhead_pct;  // arclength vs Grid A* cost
};

struct QueryRecord {
  BenchQuery query;
  std::map<std::string, PlannerCaseStats> planners;
};

struct PlannerAggregate {
  int cases = 0;
  int failures = 0;
  double mean_median_us = 0.0;
  double mean_closed_states = 0.0;
  double mean_cost = 0.0;
  double mean_overhead_pct = 0.0;
  int overhead_cases = 0;
};

struct BenchReport {
  int orders = 0;
  double grid_resolution = 0.0;
  std::vector<std::string> planners;
  std::vector<QueryRecord> records;
  // bucket name -> planner name -> aggregate over successful cases
  std::map<std::string, std::map<std::string, PlannerAggregate>> buckets;
};

struct BenchConfig {
  std::vector<std::string> planners{"flat", "hier", "grid"};
  int orders = 6;
  double grid_resolution = 0.05;
  std::uint64_t shuffle_seed = 99;
};

/// Times every query under every requested planner, replaying the whole set
/// `orders` times in freshly shuffled orders, and reports case-level median
/// latencies plus per-bucket aggregates. Grid floors are rasterized before
/// the timed region (the baseline's costmap is resident, as deployed).
inline BenchReport run_benchmark(PassageGraph& pg, const QuerySet& queries,
                                 const BenchConfig& cfg = {}) {
  BenchReport report;
  report.orders = std::max(1, cfg.orders);
  report.grid_resolution = cfg.grid_resolution;
  report.planners = cfg.planners;

  Planner planner(pg);
  const AreaGraph& g = pg.map();

  const bool with_grid = std::find(cfg.planners.begin(), cfg.planners.end(),
                                   "grid") != cfg.planners.end();
  std::map<std::string, OccGrid> floor_grids;
  if (with_grid) {
    for (const BenchQuery& q : queries) {
      if (q.start_level != q.goal_level) continue;
      if (!floor_grids.count(q.start_level)) {
        floor_grids.emplace(q.start_level,
                            rasterize_floor(g, q.start_level, cfg.grid_resolution));
      }
    }
  }

  report.records.resize(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) report.records[i].query = queries[i];

  std::mt19937_64 order_rng(cfg.shuffle_seed);
  std::vector<std::size_t> sequence(queries.size());
  for (std::size_t i = 0; i < sequence.size(); ++i) sequence[i] = i;

  for (int order = 0; order < report.orders; ++order) {
    for (std::size_t i = sequence.size(); i > 1; --i) {
      std::swap(sequence[i - 1], sequence[static_cast<std::size_t>(
                                     rand_int(order_rng, 0, static_cast<int>(i) - 1))]);
    }
    for (const std::size_t qi : sequence) {
      const BenchQuery& q = queries[qi];
      QueryRecord& rec = report.records[qi];
      for (const std::string& pl : cfg.planners) {
        PlannerCaseStats& st = rec.planners[pl];
        bool success = false;
        std::string failure;
        double cost = 0.0, arclength = 0.0;
        int hops = 0, closed = 0;
        bool fallback = false;
        const auto t0 = detail::BenchClock::now();
        if (pl == "grid") {
          if (q.start_level != q.goal_level) {
            failure = "cross-floor not supported by the grid baseline";
          } else {
            const GridBaselineResult r = grid_astar_baseline(
                g, q.plan_query(), cfg.grid_resolution, &floor_grids.at(q.start_level));
            success = r.success;
            failure = r.failure;
            cost = r.cost;
            arclength = r.cost;
            closed = r.closed_states;
          }
        } else {
          const PlanResult r = pl == "flat" ? planner.plan_flat(q.plan_query())
                                            : planner.plan_hierarchical(q.plan_query());
          success = r.success;
          failure = r.failure;
          cost = r.cost;
          arclength = detail::path_arclength(r.dense_path);
          hops = std::max(0, static_cast<int>(r.passages.size()) - 1);
          closed = r.closed_states;
          fallback = r.used_fallback;
        }
        const std::int64_t us = detail::us_between(t0, detail::BenchClock::now());

        st.times_us.push_back(us);
        if (order == 0) {
          st.success = success;
          st.failure = failure;
          st.cost = cost;
          st.arclength = arclength;
          st.hops = hops;
          st.closed_states = closed;
          st.used_fallback = fallback;
        } else if (success != st.success || closed != st.closed_states ||
                   std::abs(cost - st.cost) > 1e-9) {
          st.deterministic = false;
        }
      }
    }
  }

  for (QueryRecord& rec : report.records) {
    const PlannerCaseStats* grid = nullptr;
    if (auto it = rec.planners.find("grid"); it != rec.planners.end() && it->second.success) {
      grid = &it->second;
    }
    for (auto& [name, st] : rec.planners) {
      st.median_us = detail::median_us(st.times_us);
      if (!st.success) continue;
      if (name == "grid") {
        st.overhead_pct = 0.0;
      } else if (grid && grid->cost > 0.0) {
        st.overhead_pct = (st.arclength / grid->cost - 1.0) * 100.0;
      }
    }
  }

  for (const QueryRecord& rec : report.records) {
    const std::string bucket = to_string(rec.query.bucket);
    for (const auto& [name, st] : rec.planners) {
      PlannerAggregate& agg = report.buckets[bucket][name];
      if (!st.success) {
        agg.failures++;
        continue;
      }
      agg.cases++;
      agg.mean_median_us += static_cast<double>(st.median_us);
      agg.mean_closed_states += st.closed_states;
      agg.mean_cost += st.cost;
      if (st.overhead_pct) {
        agg.mean_overhead_pct += *st.overhead_pct;
        agg.overhead_cases++;
      }
    }
  }
  for (auto& [bucket, planners] : report.buckets) {
    for (auto& [name, agg] : planners) {
      if (agg.cases > 0) {
        agg.mean_median_us /= agg.cases;
        agg.mean_closed_states /= agg.cases;
        agg.mean_cost /= agg.cases;
      }
      if (agg.overhead_cases > 0) agg.mean_overhead_pct /= agg.overhead_cases;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Cache ablation

struct AblationPair {
  std::int64_t cached_wall_us = 0;
  std::int64_t uncached_wall_us = 0;
  std::int64_t rebuild_us = 0;  // clear + build measured on its own
  std::int64_t cached_search_us = 0;
  std::int64_t uncached_search_us = 0;
  bool paths_equal = false;
};

struct AblationRow {
  BenchQuery query;
  std::vector<AblationPair> pairs;
};

struct AblationReport {
  std::vector<AblationRow> rows;
  int pairs_total = 0;
  int paths_equal = 0;
  double mean_cached_wall_us = 0.0;
  double mean_uncached_wall_us = 0.0;
  double mean_rebuild_us = 0.0;
  double mean_cached_search_us = 0.0;
  double mean_uncached_search_us = 0.0;
};

/// Paired trials of the hierarchical planner with the shortcut cache warm
/// versus cleared-and-rebuilt inside the timed region. A warmup plan per
/// query fills every lazy leaf raster first so the pair differs only in the
/// cache work itself. Never parallelized: the pair shares one wall clock.
inline AblationReport run_cache_ablation(PassageGraph& pg, const QuerySet& queries,
                                         int trials = 5) {
  AblationReport report;
  Planner planner(pg);
  if (!pg.hier_cache_built()) pg.build_hier_cache();

  for (const BenchQuery& q : queries) {
    AblationRow row;
    row.query = q;
    const PlanQuery pq = q.plan_query();
    (void)planner.plan_hierarchical(pq);  // warmup, untimed

    for (int trial = 0; trial < std::max(1, trials); ++trial) {
      AblationPair pair;

      // Rebuild first so the cached plan below runs in the same
      // post-build machine state as the uncached plan; otherwise the
      // cached search inherits a warm branch predictor from the previous
      // trial and the internal timing comparison picks up a bias that
      // has nothing to do with the planner.
      const auto r0 = detail::BenchClock::now();
      pg.clear_hier_cache();
      pg.build_hier_cache();
      pair.rebuild_us = detail::us_between(r0, detail::BenchClock::now());

      const auto c0 = detail::BenchClock::now();
      const PlanResult cached = planner.plan_hierarchical(pq);
      pair.cached_wall_us = detail::us_between(c0, detail::BenchClock::now());
      pair.cached_search_us = cached.timings.search_us;

      const auto u0 = detail::BenchClock::now();
      pg.clear_hier_cache();
      pg.build_hier_cache();
      const PlanResult uncached = planner.plan_hierarchical(pq);
      pair.uncached_wall_us = detail::us_between(u0, detail::BenchClock::now());
      pair.uncached_search_us = uncached.timings.search_us;

      pair.paths_equal = cached.success && uncached.success &&
                         cached.passages == uncached.passages &&
                         std::abs(cached.cost - uncached.cost) < 1e-6;

      report.pairs_total++;
      report.paths_equal += pair.paths_equal;
      report.mean_cached_wall_us += static_cast<double>(pair.cached_wall_us);
      report.mean_uncached_wall_us += static_cast<double>(pair.uncached_wall_us);
      report.mean_rebuild_us += static_cast<double>(pair.rebuild_us);
      report.mean_cached_search_us += static_cast<double>(pair.cached_search_us);
      report.mean_uncached_search_us += static_cast<double>(pair.uncached_search_us);
      row.pairs.push_back(pair);
    }
    report.rows.push_back(std::move(row));
  }
  if (report.pairs_total > 0) {
    const double n = report.pairs_total;
    report.mean_cached_wall_us /= n;
    report.mean_uncached_wall_us /= n;
    report.mean_rebuild_us /= n;
    report.mean_cached_search_us /= n;
    report.mean_uncached_search_us /= n;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Storage report

struct StorageReport {
  std::size_t vector_bytes = 0;      // osmAG XML as written
  std::size_t grid_bytes = 0;        // PGM payloads, all floors summed
  std::size_t pointcloud_bytes = 0;  // analytic estimate, never generated
  double grid_resolution = 0.05;
  double free_area_m2 = 0.0;
  double cloud_point_spacing = 0.1;  // one point per spacing^2 of free area
  int cloud_bytes_per_point = 12;    // three float32 coordinates
  bool pointcloud_is_estimate = true;
  double grid_over_vector = 0.0;
  double pointcloud_over_vector = 0.0;
};

/// Bytes needed to hold the same environment as vector map, occupancy grid
/// and point cloud. The cloud number is an estimate from free floor area at
/// a fixed sampling density; no cloud is synthesized.
inline StorageReport storage_report(const AreaGraph& g, double grid_resolution = 0.05,
                                    double cloud_point_spacing = 0.1,
                                    int cloud_bytes_per_point = 12) {
  StorageReport out;
  out.grid_resolution = grid_resolution;
  out.cloud_point_spacing = cloud_point_spacing;
  out.cloud_bytes_per_point = cloud_bytes_per_point;
  out.vector_bytes = write_osmag(g).size();

  std::set<std::string> levels;
  for (const Area& a : g.areas) {
    if (g.is_leaf(a)) levels.insert(a.level);
  }
  for (const std::string& level : levels) {
    const OccGrid grid = rasterize_floor(g, level, grid_resolution);
    out.grid_bytes += pgm_bytes(grid).size();
    out.free_area_m2 += grid.free_area_m2();
  }
  out.pointcloud_bytes = static_cast<std::size_t>(
      std::llround(out.free_area_m2 / (cloud_point_spacing * cloud_point_spacing)) *
      static_cast<long long>(cloud_bytes_per_point));
  if (out.vector_bytes > 0) {
    out.grid_over_vector =
        static_cast<double>(out.grid_bytes) / static_cast<double>(out.vector_bytes);
    out.pointcloud_over_vector = static_cast<double>(out.pointcloud_bytes) /
                                 static_cast<double>(out.vector_bytes);
  }
  return out;
}

}  // namespace agnav

#endif  // AGNAV_BENCH_HPP
