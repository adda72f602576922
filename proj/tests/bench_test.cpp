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
#include <cstdlib>

#include "agnav/bench.hpp"
#include "agnav/synth_map.hpp"
#include "test_maps.hpp"

using namespace agnav;
using Catch::Approx;

namespace {

Campus wide_campus() {
  CampusConfig cfg;
  cfg.floors = 2;
  cfg.sectors = 7;  // sector-to-sector routes exceed six hops
  cfg.rooms_per_side = 3;
  cfg.seed = 3;
  return generate_campus(cfg);
}

}  // namespace

TEST_CASE("hop buckets follow the thresholds") {
  CHECK(bucket_from_hops(0, false) == QueryBucket::kShort);
  CHECK(bucket_from_hops(3, false) == QueryBucket::kShort);
  CHECK(bucket_from_hops(4, false) == QueryBucket::kMedium);
  CHECK(bucket_from_hops(6, false) == QueryBucket::kMedium);
  CHECK(bucket_from_hops(7, false) == QueryBucket::kLong);
  CHECK(bucket_from_hops(2, true) == QueryBucket::kCrossFloor);
  CHECK(std::string(to_string(QueryBucket::kCrossFloor)) == "cross_floor");
}

TEST_CASE("query generation is seeded, routable and margin-respecting") {
  Campus c = wide_campus();
  PassageGraph pg(c.graph);
  Planner planner(pg);

  QuerySetConfig qc;
  qc.count = 40;
  qc.seed = 5;
  const QuerySet a = generate_queries(pg, qc);
  const QuerySet b = generate_queries(pg, qc);
  REQUIRE(a.size() == 40);
  REQUIRE(b.size() == 40);

  int cross = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].start.x == b[i].start.x);
    CHECK(a[i].goal.y == b[i].goal.y);
    CHECK(a[i].bucket == b[i].bucket);
    CHECK(a[i].start_leaf == b[i].start_leaf);

    // Reference plan agrees with the recorded hops and cost.
    const PlanResult ref = planner.plan_flat(a[i].plan_query());
    REQUIRE(ref.success);
    CHECK(std::max(0, static_cast<int>(ref.passages.size()) - 1) == a[i].hops);
    CHECK(ref.cost == Approx(a[i].ref_cost));
    CHECK(a[i].bucket ==
          bucket_from_hops(a[i].hops, a[i].start_level != a[i].goal_level));
    cross += a[i].bucket == QueryBucket::kCrossFloor;

    // Endpoints are inside their leaves with wall clearance.
    const Area* sa = c.graph.find_area(a[i].start_leaf);
    REQUIRE(sa != nullptr);
    CHECK(point_strictly_in_polygon(sa->ring, a[i].start, 1e-9));
    CHECK(distance_to_polygon_boundary(sa->ring, a[i].start) >= qc.margin - 1e-9);
  }
  CHECK(cross > 0);
  CHECK(cross < 40);

  qc.seed = 6;
  const QuerySet other = generate_queries(pg, qc);
  bool differs = false;
  for (std::size_t i = 0; i < other.size(); ++i) {
    if (other[i].start.x != a[i].start.x || other[i].goal.x != a[i].goal.x) {
      differs = true;
      break;
    }
  }
  CHECK(differs);
}

TEST_CASE("grid baseline matches planner cost inside one room") {
  const AreaGraph g = parse_osmag(agtest::two_room_map());
  PassageGraph pg(g);
  Planner planner(pg);

  PlanQuery q;
  q.start = {1.0, 4.0};
  q.goal = {9.0, 8.0};
  q.start_level = q.goal_level = "1";
  const PlanResult flat = planner.plan_flat(q);
  REQUIRE(flat.success);

  const double res = pg.config().leaf_res;
  const GridBaselineResult grid = grid_astar_baseline(g, q, res);
  REQUIRE(grid.success);
  CHECK(grid.closed_states > 0);
  CHECK(std::abs(grid.cost - flat.cost) <= 2.0 * res);
}

TEST_CASE("grid baseline rejects cross-floor queries") {
  Campus c = wide_campus();
  PlanQuery q;
  q.start_level = "1";
  q.goal_level = "2";
  CHECK_THROWS_AS(grid_astar_baseline(c.graph, q, 0.1), CrossFloorUnsupportedError);
}

TEST_CASE("benchmark medians, determinism and planner agreement") {
  Campus c = wide_campus();
  PassageGraph pg(c.graph);

  QuerySetConfig qc;
  qc.count = 36;
  qc.seed = 11;
  const QuerySet qs = generate_queries(pg, qc);

  BenchConfig bc;
  bc.orders = 3;
  bc.grid_resolution = 0.1;
  const BenchReport rep = run_benchmark(pg, qs, bc);
  REQUIRE(rep.records.size() == qs.size());

  for (const QueryRecord& rec : rep.records) {
    REQUIRE(rec.planners.size() == 3);
    const PlannerCaseStats& flat = rec.planners.at("flat");
    const PlannerCaseStats& hier = rec.planners.at("hier");
    const PlannerCaseStats& grid = rec.planners.at("grid");

    for (const auto& [name, st] : rec.planners) {
      CHECK(st.times_us.size() == 3);
      CHECK(st.deterministic);
      std::vector<std::int64_t> sorted = st.times_us;
      std::sort(sorted.begin(), sorted.end());
      CHECK(st.median_us == sorted[1]);
    }

    REQUIRE(flat.success);
    REQUIRE(hier.success);
    CHECK(std::abs(flat.cost - hier.cost) < 1e-6);

    if (rec.query.bucket == QueryBucket::kCrossFloor) {
      CHECK_FALSE(grid.success);
    } else {
      REQUIRE(grid.success);
      CHECK(*grid.overhead_pct == 0.0);
      REQUIRE(flat.overhead_pct.has_value());
      REQUIRE(hier.overhead_pct.has_value());
      // Identical costs mean identical overhead columns.
      CHECK(*flat.overhead_pct == Approx(*hier.overhead_pct).margin(1e-9));
    }
  }

  REQUIRE(rep.buckets.count("short"));
  REQUIRE(rep.buckets.count("long"));
  const auto& long_bucket = rep.buckets.at("long");
  CHECK(long_bucket.at("hier").mean_closed_states <
        long_bucket.at("flat").mean_closed_states);

  // Grid search volume grows with route length.
  const double grid_short = rep.buckets.at("short").at("grid").mean_closed_states;
  const double grid_long = long_bucket.at("grid").mean_closed_states;
  CHECK(grid_short > 0);
  CHECK(grid_long > grid_short);
  if (rep.buckets.count("medium")) {
    const double grid_medium = rep.buckets.at("medium").at("grid").mean_closed_states;
    CHECK(grid_short < grid_medium);
    CHECK(grid_medium < grid_long);
  }
}

TEST_CASE("benchmark with one query, one planner, one order") {
  const AreaGraph g = parse_osmag(agtest::two_room_map());
  PassageGraph pg(g);

  QuerySetConfig qc;
  qc.count = 1;
  qc.seed = 2;
  const QuerySet qs = generate_queries(pg, qc);
  REQUIRE(qs.size() == 1);

  BenchConfig bc;
  bc.planners = {"hier"};
  bc.orders = 1;
  const BenchReport rep = run_benchmark(pg, qs, bc);
  REQUIRE(rep.records.size() == 1);
  REQUIRE(rep.records[0].planners.size() == 1);
  CHECK(rep.records[0].planners.at("hier").times_us.size() == 1);
  CHECK(rep.records[0].planners.at("hier").success);
}

TEST_CASE("cache ablation accounts for the rebuild") {
  Campus c = generate_campus();
  PassageGraph pg(c.graph);

  QuerySetConfig qc;
  qc.count = 5;
  qc.seed = 17;
  const QuerySet qs = generate_queries(pg, qc);

  const AblationReport rep = run_cache_ablation(pg, qs, 3);
  REQUIRE(rep.pairs_total == 15);
  CHECK(rep.paths_equal == rep.pairs_total);
  CHECK(rep.mean_uncached_wall_us > rep.mean_cached_wall_us);

  // The wall-time gap is the rebuild, not mystery overhead.
  const double delta = rep.mean_uncached_wall_us - rep.mean_cached_wall_us;
  REQUIRE(rep.mean_rebuild_us > 0);
  CHECK(std::abs(delta - rep.mean_rebuild_us) <= 0.2 * rep.mean_rebuild_us);

  // Route search itself is cache-state independent.
  REQUIRE(rep.mean_cached_search_us >= 0);
  const double lo = std::min(rep.mean_cached_search_us, rep.mean_uncached_search_us);
  const double hi = std::max(rep.mean_cached_search_us, rep.mean_uncached_search_us);
  if (lo > 0) CHECK(hi / lo <= 2.0);
}

TEST_CASE("storage report: ratios, estimate label, small-map bound") {
  const AreaGraph tiny = parse_osmag(agtest::two_room_map());
  const StorageReport ts = storage_report(tiny);
  CHECK(ts.vector_bytes > 0);
  CHECK(ts.vector_bytes < 10 * 1024);
  CHECK(ts.pointcloud_is_estimate);

  Campus c = generate_campus();
  const StorageReport cs = storage_report(c.graph);
  CHECK(cs.grid_resolution == 0.05);
  CHECK(cs.grid_over_vector > 10.0);
  CHECK(cs.pointcloud_over_vector > cs.grid_over_vector);
  const auto expect_cloud = static_cast<std::size_t>(
      std::llround(cs.free_area_m2 / (0.1 * 0.1)) * 12LL);
  CHECK(cs.pointcloud_bytes == expect_cloud);
}

TEST_CASE("doubling floor area doubles grid bytes but not vector bytes") {
  CampusConfig small;
  small.floors = 1;
  small.sectors = 2;
  small.rooms_per_side = 3;
  CampusConfig big = small;
  big.room_d = small.room_d * 2.0;  // deeper rooms, same element count

  const StorageReport a = storage_report(generate_campus(small).graph);
  const StorageReport b = storage_report(generate_campus(big).graph);
  const double grid_ratio =
      static_cast<double>(b.grid_bytes) / static_cast<double>(a.grid_bytes);
  const double vector_ratio =
      static_cast<double>(b.vector_bytes) / static_cast<double>(a.vector_bytes);
  CHECK(grid_ratio > 1.5);
  CHECK(grid_ratio < 2.4);
  CHECK(vector_ratio < 1.3);
}
