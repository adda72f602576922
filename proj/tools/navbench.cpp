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
// navbench: command line front end for the agnav library. Every subcommand
// emits a JSON report to stdout (or -o file); --pretty renders a terse
// human-readable summary instead. Exit codes are a stable contract for
// scripting: 0 success, 1 validation failure, 2 planning failure, 3 I/O
// error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "agnav/area_graph.hpp"
#include "agnav/bench.hpp"
#include "agnav/executor.hpp"
#include "agnav/hier_planner.hpp"
#include "agnav/localizer.hpp"
#include "agnav/raster.hpp"
#include "agnav/scan_sim.hpp"
#include "agnav/synth_map.hpp"
#include "agnav/validation.hpp"

namespace {

using agnav::Vec2;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitPlanning = 2;
constexpr int kExitIo = 3;

/// Thrown by subcommand bodies to terminate with a specific exit code.
struct CliError {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitIo, "cannot open file: " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{kExitIo, "cannot write file: " + path};
  out << content;
}

agnav::AreaGraph load_map(const std::string& path, bool lenient) {
  const std::string text = read_file(path);
  try {
    agnav::ParseOptions opt;
    opt.lenient = lenient;
    return agnav::parse_osmag(text, opt);
  } catch (const agnav::ParseError& e) {
    throw CliError{kExitValidation, e.what()};
  }
}

/// JSON goes to -o when given, else stdout; --pretty swaps the stdout copy
/// for a human-readable table when the subcommand provides one.
void emit(const json& j, const std::string& out_path, bool pretty,
          const std::string& table = "") {
  if (!out_path.empty()) write_file(out_path, j.dump(2) + "\n");
  if (pretty && !table.empty()) {
    std::cout << table;
  } else if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  }
}

json vec_json(const Vec2& v) { return json::array({v.x, v.y}); }

Vec2 vec_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

/// Parses "x,y,level" into a position and floor label.
void parse_pose_arg(const std::string& s, Vec2& p, std::string& level,
                    const char* flag) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 3) {
    throw CliError{kExitIo, std::string(flag) + " expects x,y,level"};
  }
  try {
    p.x = std::stod(parts[0]);
    p.y = std::stod(parts[1]);
  } catch (const std::exception&) {
    throw CliError{kExitIo, std::string(flag) + " has non-numeric coordinates"};
  }
  level = parts[2];
}

json timings_json(const agnav::StageTimings& t) {
  return {{"inject_us", t.inject_us}, {"lift_us", t.lift_us},
          {"assemble_us", t.assemble_us}, {"search_us", t.search_us},
          {"expand_us", t.expand_us}, {"total_us", t.total_us}};
}

json plan_json(const agnav::PlanResult& r, bool with_path) {
  json j = {{"success", r.success},
            {"failure", r.failure},
            {"cost", r.cost},
            {"passages", r.passages},
            {"hops", std::max(0, static_cast<int>(r.passages.size()) - 1)},
            {"closed_states", r.closed_states},
            {"lift_closed_states", r.lift_closed_states},
            {"used_fallback", r.used_fallback},
            {"fallback_reason", r.fallback_reason},
            {"same_floor", r.same_floor},
            {"lca", r.lca},
            {"floor_transitions", r.floor_transitions},
            {"timings", timings_json(r.timings)}};
  if (with_path) {
    json path = json::array();
    for (const Vec2& p : r.dense_path) path.push_back(vec_json(p));
    j["dense_path"] = std::move(path);
  }
  return j;
}

agnav::QueryBucket bucket_from_string(const std::string& s) {
  if (s == "short") return agnav::QueryBucket::kShort;
  if (s == "medium") return agnav::QueryBucket::kMedium;
  if (s == "long") return agnav::QueryBucket::kLong;
  if (s == "cross_floor") return agnav::QueryBucket::kCrossFloor;
  throw CliError{kExitIo, "unknown query bucket: " + s};
}

json query_json(const agnav::BenchQuery& q) {
  return {{"id", q.id},
          {"start", vec_json(q.start)},
          {"goal", vec_json(q.goal)},
          {"start_level", q.start_level},
          {"goal_level", q.goal_level},
          {"start_leaf", q.start_leaf},
          {"goal_leaf", q.goal_leaf},
          {"bucket", agnav::to_string(q.bucket)},
          {"hops", q.hops},
          {"ref_cost", q.ref_cost}};
}

agnav::BenchQuery query_from_json(const json& j) {
  agnav::BenchQuery q;
  q.id = j.at("id").get<int>();
  q.start = vec_from_json(j.at("start"));
  q.goal = vec_from_json(j.at("goal"));
  q.start_level = j.at("start_level").get<std::string>();
  q.goal_level = j.at("goal_level").get<std::string>();
  q.start_leaf = j.at("start_leaf").get<std::string>();
  q.goal_leaf = j.at("goal_leaf").get<std::string>();
  q.bucket = bucket_from_string(j.at("bucket").get<std::string>());
  q.hops = j.at("hops").get<int>();
  q.ref_cost = j.at("ref_cost").get<double>();
  return q;
}

/// Loads a query-set file and refuses one built from a different map.
agnav::QuerySet load_queries(const std::string& path, const agnav::AreaGraph& g) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw CliError{kExitIo, "bad query file " + path + ": " + e.what()};
  }
  if (j.value("schema", "") != std::string("agnav-queries-v1")) {
    throw CliError{kExitIo, "unknown query file schema in " + path};
  }
  if (j.value("map_hash", std::uint64_t{0}) != agnav::content_hash(g)) {
    throw CliError{kExitIo,
                   "query set was generated from a different map: " + path};
  }
  agnav::QuerySet qs;
  try {
    for (const json& e : j.at("queries")) qs.push_back(query_from_json(e));
  } catch (const json::exception& e) {
    throw CliError{kExitIo, "bad query record in " + path + ": " + e.what()};
  }
  return qs;
}

std::string fmt(double v, int prec = 2) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(prec) << v;
  return s.str();
}

/// Aligned key/value block for --pretty output.
std::string kv_table(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t w = 0;
  for (const auto& [k, v] : rows) w = std::max(w, k.size());
  std::ostringstream s;
  for (const auto& [k, v] : rows) {
    s << std::left << std::setw(static_cast<int>(w) + 2) << k << v << "\n";
  }
  return s.str();
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct CommonOpts {
  std::string map_path;
  std::string out_path;
  bool pretty = false;
  bool lenient = false;
};

int run_validate(const CommonOpts& c) {
  const agnav::AreaGraph g = load_map(c.map_path, c.lenient);
  const agnav::ValidationReport rep = agnav::validate(g);
  json violations = json::array();
  for (const agnav::Violation& v : rep.violations) {
    violations.push_back({{"invariant", agnav::to_string(v.invariant)},
                          {"elements", json::array({v.subject})},
                          {"message", v.detail}});
  }
  const json j = {{"file", c.map_path},
                  {"ok", rep.ok()},
                  {"areas", g.areas.size()},
                  {"passages", g.passages.size()},
                  {"violations", std::move(violations)}};
  std::ostringstream table;
  table << (rep.ok() ? "OK" : "INVALID") << "  " << c.map_path << "  ("
        << g.areas.size() << " areas, " << g.passages.size() << " passages)\n";
  for (const agnav::Violation& v : rep.violations) {
    table << "  [" << agnav::to_string(v.invariant) << "] " << v.subject << ": "
          << v.detail << "\n";
  }
  emit(j, c.out_path, c.pretty, table.str());
  return rep.ok() ? kExitOk : kExitValidation;
}

int run_build_graph(const CommonOpts& c, const std::string& cache_path) {
  const agnav::AreaGraph g = load_map(c.map_path, c.lenient);
  const auto t0 = std::chrono::steady_clock::now();
  agnav::PassageGraph pg(g);
  pg.build_hier_cache();
  const auto t1 = std::chrono::steady_clock::now();
  pg.save_cache(cache_path);
  const auto build_us =
      std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
  const json j = {{"file", c.map_path},
                  {"cache", cache_path},
                  {"map_hash", agnav::content_hash(g)},
                  {"passages", pg.n_passages()},
                  {"build_us", build_us}};
  emit(j, c.out_path, c.pretty,
       kv_table({{"cache", cache_path},
                 {"passages", std::to_string(pg.n_passages())},
                 {"build_us", std::to_string(build_us)}}));
  return kExitOk;
}

struct PlanOpts {
  std::string start_arg, goal_arg;
  std::string planner = "hier";
  std::string cache_path;
  double resolution = 0.05;
  bool with_path = false;
};

int run_plan(const CommonOpts& c, const PlanOpts& p) {
  const agnav::AreaGraph g = load_map(c.map_path, c.lenient);
  agnav::PlanQuery q;
  parse_pose_arg(p.start_arg, q.start, q.start_level, "--start");
  parse_pose_arg(p.goal_arg, q.goal, q.goal_level, "--goal");

  json j;
  std::string table;
  bool success = false;
  if (p.planner == "grid") {
    agnav::GridBaselineResult r;
    try {
      r = agnav::grid_astar_baseline(g, q, p.resolution);
    } catch (const agnav::CrossFloorUnsupportedError& e) {
      r.success = false;
      r.failure = e.what();
    }
    success = r.success;
    j = {{"planner", "grid"},
         {"success", r.success},
         {"failure", r.failure},
         {"cost", r.cost},
         {"closed_states", r.closed_states},
         {"resolution", p.resolution}};
    if (p.with_path) {
      json path = json::array();
      for (const Vec2& v : r.path) path.push_back(vec_json(v));
      j["dense_path"] = std::move(path);
    }
    table = kv_table({{"planner", "grid"},
                      {"success", r.success ? "yes" : "no"},
                      {"cost", fmt(r.cost, 3)},
                      {"closed_states", std::to_string(r.closed_states)}});
  } else if (p.planner == "flat" || p.planner == "hier") {
    agnav::PassageGraph pg =
        p.cache_path.empty()
            ? agnav::PassageGraph(g)
            : [&] {
                try {
                  return agnav::PassageGraph::from_cache(g, p.cache_path);
                } catch (const agnav::CacheFileError& e) {
                  throw CliError{kExitIo, e.what()};
                }
              }();
    agnav::Planner planner(pg);
    const agnav::PlanResult r =
        p.planner == "flat" ? planner.plan_flat(q) : planner.plan_hierarchical(q);
    success = r.success;
    j = plan_json(r, p.with_path);
    j["planner"] = p.planner;
    std::ostringstream route;
    for (const std::string& name : r.passages) route << name << " ";
    table = kv_table({{"planner", p.planner},
                      {"success", r.success ? "yes" : "no"},
                      {"failure", r.failure},
                      {"cost", fmt(r.cost, 3)},
                      {"hops", std::to_string(std::max(
                                   0, static_cast<int>(r.passages.size()) - 1))},
                      {"closed_states", std::to_string(r.closed_states)},
                      {"route", route.str()},
                      {"total_us", std::to_string(r.timings.total_us)}});
  } else {
    throw CliError{kExitIo, "unknown planner: " + p.planner};
  }
  emit(j, c.out_path, c.pretty, table);
  return success ? kExitOk : kExitPlanning;
}

struct GenQueriesOpts {
  int count = 100;
  std::uint64_t seed = 1;
  double cross_fraction = 0.2;
  double margin = 0.3;
  double min_separation = 1.0;
};

int run_gen_queries(const CommonOpts& c, const GenQueriesOpts& o) {
  const agnav::AreaGraph g = load_map(c.map_path, c.lenient);
  agnav::PassageGraph pg(g);
  agnav::QuerySetConfig qc;
  qc.count = o.count;
  qc.seed = o.seed;
  qc.cross_floor_fraction = o.cross_fraction;
  qc.margin = o.margin;
  qc.min_separation = o.min_separation;
  agnav::QuerySet qs;
  try {
    qs = agnav::generate_queries(pg, qc);
  } catch (const agnav::Error& e) {
    throw CliError{kExitPlanning, e.what()};
  }
  json queries = json::array();
  int buckets[4] = {0, 0, 0, 0};
  for (const agnav::BenchQuery& q : qs) {
    queries.push_back(query_json(q));
    buckets[static_cast<int>(q.bucket)]++;
  }
  const json j = {{"schema", "agnav-queries-v1"},
                  {"map_hash", agnav::content_hash(g)},
                  {"count", qs.size()},
                  {"seed", o.seed},
                  {"queries", std::move(queries)}};
  emit(j, c.out_path, c.pretty,
       kv_table({{"queries", std::to_string(qs.size())},
                 {"short", std::to_string(buckets[0])},
                 {"medium", std::to_string(buckets[1])},
                 {"long", std::to_string(buckets[2])},
                 {"cross_floor", std::to_string(buckets[3])}}));
  return kExitOk;
}

json aggregate_json(const agnav::PlannerAggregate& a) {
  return {{"cases", a.cases},
          {"failures", a.failures},
          {"mean_median_us", a.mean_median_us},
          {"mean_closed_states", a.mean_closed_states},
          {"mean_cost", a.mean_cost},
          {"mean_overhead_pct", a.mean_overhead_pct},
          {"overhead_cases", a.overhead_cases}};
}

struct BenchOpts {
  std::string queries_path;
  int orders = 6;
  double resolution = 0.05;
  std::vector<std::string> planners{"flat", "hier", "grid"};
  int jobs = 1;
};

int run_bench(const CommonOpts& c, const BenchOpts& o) {
  const agnav::AreaGraph g = load_map(c.map_path, c.lenient);
  const agnav::QuerySet qs = load_queries(o.queries_path, g);
  agnav::PassageGraph pg(g);
  if (o.jobs > 1) {
    std::cerr << "navbench: benchmark timing runs serially; ignoring --jobs "
              << o.jobs << "\n";
  }
  agnav::BenchConfig bc;
  bc.orders = o.orders;
  bc.grid_resolution = o.resolution;
  bc.planners = o.planners;
  const agnav::BenchReport rep = agnav::run_benchmark(pg, qs, bc);

  json buckets;
  for (const auto& [bucket, per_planner] : rep.buckets) {
    json row;
    for (const auto& [planner, agg] : per_planner) row[planner] = aggregate_json(agg);
    buckets[bucket] = std::move(row);
  }
  json records = json::array();
  for (const agnav::QueryRecord& rec : rep.records) {
    json planners;
    for (const auto& [name, st] : rec.planners) {
      json e = {{"success", st.success},
                {"failure", st.failure},
                {"cost", st.cost},
                {"arclength", st.arclength},
                {"hops", st.hops},
                {"closed_states", st.closed_states},
                {"used_fallback", st.used_fallback},
                {"deterministic", st.deterministic},
                {"median_us", st.median_us},
                {"times_us", st.times_us}};
      if (st.overhead_pct) e["overhead_pct"] = *st.overhead_pct;
      planners[name] = std::move(e);
    }
    records.push_back({{"id", rec.query.id},
                       {"bucket", agnav::to_string(rec.query.bucket)},
                       {"hops", rec.query.hops},
                       {"planners", std::move(planners)}});
  }
  const json j = {{"schema", "agnav-bench-v1"},
                  {"orders", rep.orders},
                  {"grid_resolution", rep.grid_resolution},
                  {"planners", rep.planners},
                  {"queries", qs.size()},
                  {"buckets", std::move(buckets)},
                  {"records", std::move(records)}};

  std::ostringstream table;
  table << std::left << std::setw(12) << "bucket" << std::setw(8) << "planner"
        << std::right << std::setw(6) << "cases" << std::setw(6) << "fail"
        << std::setw(12) << "med_us" << std::setw(12) << "closed" << std::setw(12)
        << "cost" << std::setw(10) << "ovh_%" << "\n";
  for (const auto& [bucket, per_planner] : rep.buckets) {
    for (const auto& [planner, a] : per_planner) {
      table << std::left << std::setw(12) << bucket << std::setw(8) << planner
            << std::right << std::setw(6) << a.cases << std::setw(6) << a.failures
            << std::setw(12) << fmt(a.mean_median_us, 1) << std::setw(12)
            << fmt(a.mean_closed_states, 1) << std::setw(12) << fmt(a.mean_cost, 2)
            << std::setw(10)
            << (a.overhead_cases > 0 ? fmt(a.mean_overhead_pct, 2) : "-") << "\n";
    }
  }
  emit(j, c.out_path, c.pretty, table.str());
  return kExitOk;
}

int run_ablate(const CommonOpts& c, const std::string& queries_path, int trials) {
  const agnav::AreaGraph g = load_map(c.map_path, c.lenient);
  const agnav::QuerySet qs = load_queries(queries_path, g);
  agnav::PassageGraph pg(g);
  const agnav::AblationReport rep = agnav::run_cache_ablation(pg, qs, trials);

  json rows = json::array();
  for (const agnav::AblationRow& row : rep.rows) {
    json pairs = json::array();
    for (const agnav::AblationPair& p : row.pairs) {
      pairs.push_back({{"cached_wall_us", p.cached_wall_us},
                       {"uncached_wall_us", p.uncached_wall_us},
                       {"rebuild_us", p.rebuild_us},
                       {"cached_search_us", p.cached_search_us},
                       {"uncached_search_us", p.uncached_search_us},
                       {"paths_equal", p.paths_equal}});
    }
    rows.push_back({{"id", row.query.id}, {"pairs", std::move(pairs)}});
  }
  const json j = {{"schema", "agnav-ablate-v1"},
                  {"trials", trials},
                  {"pairs_total", rep.pairs_total},
                  {"paths_equal", rep.paths_equal},
                  {"mean_cached_wall_us", rep.mean_cached_wall_us},
                  {"mean_uncached_wall_us", rep.mean_uncached_wall_us},
                  {"mean_rebuild_us", rep.mean_rebuild_us},
                  {"mean_cached_search_us", rep.mean_cached_search_us},
                  {"mean_uncached_search_us", rep.mean_uncached_search_us},
                  {"rows", std::move(rows)}};
  emit(j, c.out_path, c.pretty,
       kv_table({
           {"paths_equal",
            std::to_string(rep.paths_equal) + "/" + std::to_string(rep.pairs_total)},
           {"mean_cached_wall_us", fmt(rep.mean_cached_wall_us, 1)},
           {"mean_uncached_wall_us", fmt(rep.mean_uncached_wall_us, 1)},
           {"mean_rebuild_us", fmt(rep.mean_rebuild_us, 1)},
           {"mean_cached_search_us", fmt(rep.mean_cached_search_us, 1)},
           {"mean_uncached_search_us", fmt(rep.mean_uncached_search_us, 1)},
       }));
  return kExitOk;
}

struct RasterOpts {
  std::string level;
  std::string window_arg;  // "x,y,size"
  double resolution = 0.05;
  std::string base;  // output basename for .pgm/.yaml
};

int run_raster(const CommonOpts& c, const RasterOpts& o) {
  const agnav::AreaGraph g = load_map(c.map_path, c.lenient);
  agnav::OccGrid grid;
  json extra;
  if (!o.window_arg.empty()) {
    Vec2 center;
    std::string size_s;
    parse_pose_arg(o.window_arg, center, size_s, "--window");
    double size = 0.0;
    try {
      size = std::stod(size_s);
    } catch (const std::exception&) {
      throw CliError{kExitIo, "--window expects x,y,size_m"};
    }
    agnav::WindowConfig wc;
    wc.size_m = size;
    wc.resolution = o.resolution;
    const agnav::RollingWindow win = agnav::extract_window(g, center, wc, o.level);
    grid = win.grid;
    extra["areas"] = win.areas;
    extra["passages"] = win.passages;
  } else {
    try {
      grid = agnav::rasterize_floor(g, o.level, o.resolution);
    } catch (const agnav::UnknownAreaError& e) {
      throw CliError{kExitValidation, e.what()};
    }
  }

  json j = {{"level", o.level},
            {"width", grid.width},
            {"height", grid.height},
            {"resolution", grid.resolution},
            {"origin", vec_json(grid.origin)},
            {"free_cells", grid.count(agnav::CellState::kFree)},
            {"occupied_cells", grid.count(agnav::CellState::kOccupied)},
            {"unknown_cells", grid.count(agnav::CellState::kUnknown)},
            {"free_area_m2", grid.free_area_m2()},
            {"pgm_bytes", agnav::pgm_bytes(grid).size()}};
  for (auto& [k, v] : extra.items()) j[k] = v;
  if (!o.base.empty()) {
    agnav::write_pgm(grid, o.base + ".pgm");
    agnav::write_grid_yaml(grid, o.base + ".pgm", o.base + ".yaml");
    j["pgm"] = o.base + ".pgm";
    j["yaml"] = o.base + ".yaml";
  }
  emit(j, c.out_path, c.pretty,
       kv_table({{"size", std::to_string(grid.width) + "x" +
                              std::to_string(grid.height) + " @ " +
                              fmt(grid.resolution, 3) + " m"},
                 {"free_area_m2", fmt(grid.free_area_m2(), 1)},
                 {"free_cells", std::to_string(grid.count(agnav::CellState::kFree))},
                 {"occupied_cells",
                  std::to_string(grid.count(agnav::CellState::kOccupied))}}));
  return kExitOk;
}

struct SimulateOpts {
  std::string start_arg, goal_arg;
  double speed = 1.0;
  std::uint64_t seed = 1;
  std::string trajectory_out;
};

int run_simulate(const CommonOpts& c, const SimulateOpts& o) {
  const agnav::AreaGraph g = load_map(c.map_path, c.lenient);
  agnav::PlanQuery q;
  parse_pose_arg(o.start_arg, q.start, q.start_level, "--start");
  parse_pose_arg(o.goal_arg, q.goal, q.goal_level, "--goal");
  agnav::PassageGraph pg(g);
  agnav::Planner planner(pg);
  const agnav::PlanResult plan = planner.plan_hierarchical(q);
  if (!plan.success) {
    emit({{"success", false}, {"failure", plan.failure}}, c.out_path, c.pretty,
         "planning failed: " + plan.failure + "\n");
    return kExitPlanning;
  }
  std::string start_leaf = q.start_leaf;
  if (start_leaf.empty()) {
    try {
      start_leaf = g.locate_leaf_area(q.start, q.start_level);
    } catch (const agnav::Error& e) {
      throw CliError{kExitPlanning, e.what()};
    }
  }
  agnav::MissionConfig mc;
  mc.speed = o.speed;
  mc.seed = o.seed;
  const agnav::MissionResult r = agnav::simulate_mission(g, plan, start_leaf, mc);

  if (!o.trajectory_out.empty()) {
    // Heading is the direction of travel so the file feeds localize-sim.
    std::ostringstream csv;
    csv << "t,x,y,theta,level\n";
    double t = 0.0, theta = 0.0;
    for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
      const agnav::Pose2D& p = r.trajectory[i];
      if (i + 1 < r.trajectory.size()) {
        const Vec2 d = r.trajectory[i + 1].position() - p.position();
        if (d.norm() > 1e-9) theta = std::atan2(d.y, d.x);
      }
      csv << fmt(t, 3) << "," << p.x << "," << p.y << "," << theta << ","
          << p.level << "\n";
      t += mc.dt;
    }
    write_file(o.trajectory_out, csv.str());
  }

  json goals = json::array();
  for (const agnav::GoalDispatch& gd : r.goals) {
    goals.push_back({{"t", gd.t},
                     {"pos", vec_json(gd.pos)},
                     {"true_goal", vec_json(gd.true_goal)},
                     {"proxy", gd.proxy},
                     {"passage", gd.passage},
                     {"window_id", gd.window_id}});
  }
  const json j = {{"success", true},
                  {"completed", r.completed},
                  {"failure", r.failure},
                  {"plan_cost", plan.cost},
                  {"sim_time_s", r.sim_time},
                  {"distance_m", r.distance},
                  {"goal_switches", r.goal_switches},
                  {"proxy_updates", r.proxy_updates},
                  {"window_refreshes", r.window_refreshes},
                  {"mean_abs_speed_err", r.mean_abs_speed_err},
                  {"max_abs_speed_err", r.max_abs_speed_err},
                  {"trajectory_points", r.trajectory.size()},
                  {"goals", std::move(goals)}};
  emit(j, c.out_path, c.pretty,
       kv_table({{"completed", r.completed ? "yes" : "no"},
                 {"sim_time_s", fmt(r.sim_time, 1)},
                 {"distance_m", fmt(r.distance, 1)},
                 {"goal_switches", std::to_string(r.goal_switches)},
                 {"proxy_updates", std::to_string(r.proxy_updates)},
                 {"window_refreshes", std::to_string(r.window_refreshes)}}));
  return r.completed ? kExitOk : kExitPlanning;
}

struct LocalizeOpts {
  std::string trajectory_path;
  std::string default_level = "1";
  int beams = 360;
  double sigma = 0.02;
  double max_range = 12.0;
  double odom_drift = 0.02;      // translation noise, fraction of step length
  double odom_drift_rot = 0.002; // heading noise, rad per meter travelled
  std::uint64_t seed = 1;
  std::string poses_out;
};

std::vector<agnav::Pose2D> read_trajectory(const std::string& path,
                                           const std::string& default_level,
                                           std::vector<double>& stamps) {
  const std::string text = read_file(path);
  std::vector<agnav::Pose2D> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        f.push_back(cur);
        cur.clear();
      } else if (!std::isspace(static_cast<unsigned char>(ch))) {
        cur += ch;
      }
    }
    f.push_back(cur);
    if (f.size() < 4) continue;
    double t, x, y, th;
    try {
      t = std::stod(f[0]);
      x = std::stod(f[1]);
      y = std::stod(f[2]);
      th = std::stod(f[3]);
    } catch (const std::exception&) {
      continue;  // header or comment row
    }
    agnav::Pose2D p;
    p.x = x;
    p.y = y;
    p.theta = th;
    p.level = f.size() > 4 && !f[4].empty() ? f[4] : default_level;
    stamps.push_back(t);
    out.push_back(std::move(p));
  }
  if (out.size() < 2) {
    throw CliError{kExitIo, "trajectory " + path + " needs at least 2 rows of t,x,y,theta[,level]"};
  }
  return out;
}

int run_localize_sim(const CommonOpts& c, const LocalizeOpts& o) {
  const agnav::AreaGraph g = load_map(c.map_path, c.lenient);
  std::vector<double> stamps;
  const std::vector<agnav::Pose2D> truth =
      read_trajectory(o.trajectory_path, o.default_level, stamps);

  std::mt19937_64 rng(o.seed);
  agnav::Tracker tracker(g);
  tracker.reset(truth[0]);
  tracker.push_odometry({stamps[0], truth[0]});

  agnav::ScanConfig sc;
  sc.beams = o.beams;
  sc.sigma = o.sigma;
  sc.max_range = o.max_range;

  agnav::Pose2D odom = truth[0];
  std::ostringstream csv;
  csv << "t,true_x,true_y,true_theta,est_x,est_y,est_theta,err_m,s_icp,status\n";

  double sq_sum = 0.0, max_err = 0.0, head_sq = 0.0, s_sum = 0.0;
  int rejected = 0;
  const std::size_t n = truth.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      // Relative motion in the previous body frame, corrupted, then replayed
      // into the drifting odometry estimate.
      const Vec2 dw = truth[i].position() - truth[i - 1].position();
      const double c0 = std::cos(-truth[i - 1].theta);
      const double s0 = std::sin(-truth[i - 1].theta);
      Vec2 db{c0 * dw.x - s0 * dw.y, s0 * dw.x + c0 * dw.y};
      double dth = agnav::angle_diff(truth[i - 1].theta, truth[i].theta);
      const double step = db.norm();
      db.x += agnav::rand_gauss(rng) * o.odom_drift * step;
      db.y += agnav::rand_gauss(rng) * o.odom_drift * step;
      dth += agnav::rand_gauss(rng) * o.odom_drift_rot * step;
      const double c1 = std::cos(odom.theta);
      const double s1 = std::sin(odom.theta);
      odom.x += c1 * db.x - s1 * db.y;
      odom.y += s1 * db.x + c1 * db.y;
      odom.theta = agnav::normalize_angle(odom.theta + dth);
      odom.level = truth[i].level;
      tracker.push_odometry({stamps[i], odom});
    }
    sc.timestamp = stamps[i];
    agnav::ScanFrame scan;
    try {
      scan = agnav::simulate_scan(g, truth[i], sc, rng);
    } catch (const agnav::PoseOutsideMapError& e) {
      throw CliError{kExitValidation,
                     "trajectory row " + std::to_string(i) + ": " + e.what()};
    }
    const agnav::TrackResult r = tracker.process(scan);
    if (!r.ok()) ++rejected;
    s_sum += r.s_icp;

    const Vec2 err_v = tracker.pose().position() - truth[i].position();
    const double err = err_v.norm();
    sq_sum += err * err;
    max_err = std::max(max_err, err);
    const double herr = agnav::angle_diff(truth[i].theta, tracker.pose().theta);
    head_sq += herr * herr;
    if (!o.poses_out.empty()) {
      csv << fmt(stamps[i], 3) << "," << truth[i].x << "," << truth[i].y << ","
          << truth[i].theta << "," << tracker.pose().x << "," << tracker.pose().y
          << "," << tracker.pose().theta << "," << err << "," << r.s_icp << ","
          << agnav::to_string(r.status) << "\n";
    }
  }
  if (!o.poses_out.empty()) write_file(o.poses_out, csv.str());

  const double dn = static_cast<double>(n);
  const double ate_rmse = std::sqrt(sq_sum / dn);
  const double heading_rmse_deg = std::sqrt(head_sq / dn) * 180.0 / std::numbers::pi;
  const Vec2 final_v = tracker.pose().position() - truth.back().position();
  const json j = {{"frames", n},
                  {"ate_rmse_m", ate_rmse},
                  {"ate_max_m", max_err},
                  {"final_error_m", final_v.norm()},
                  {"heading_rmse_deg", heading_rmse_deg},
                  {"rejected_frames", rejected},
                  {"mean_s_icp", s_sum / dn},
                  {"scan_sigma_m", o.sigma},
                  {"odom_drift", o.odom_drift}};
  emit(j, c.out_path, c.pretty,
       kv_table({{"frames", std::to_string(n)},
                 {"ate_rmse_m", fmt(ate_rmse, 4)},
                 {"ate_max_m", fmt(max_err, 4)},
                 {"final_error_m", fmt(final_v.norm(), 4)},
                 {"heading_rmse_deg", fmt(heading_rmse_deg, 3)},
                 {"rejected_frames", std::to_string(rejected)}}));
  return kExitOk;
}

struct GenMapOpts {
  std::uint64_t seed = 1;
  int floors = 3;
  int sectors = 4;
  int rooms_per_side = 5;
  double room_w = 6.0;
  double room_d = 8.0;
  double corridor_w = 3.0;
  double door_w = 1.0;
  bool no_elevator = false;
  bool no_stairs = false;
};

int run_gen_map(const CommonOpts& c, const GenMapOpts& o) {
  agnav::CampusConfig cfg;
  cfg.seed = o.seed;
  cfg.floors = o.floors;
  cfg.sectors = o.sectors;
  cfg.rooms_per_side = o.rooms_per_side;
  cfg.room_w = o.room_w;
  cfg.room_d = o.room_d;
  cfg.corridor_w = o.corridor_w;
  cfg.door_w = o.door_w;
  cfg.with_elevator = !o.no_elevator;
  cfg.with_stairs = !o.no_stairs;
  const agnav::Campus campus = agnav::generate_campus(cfg);
  const std::string xml = agnav::write_osmag(campus.graph);

  if (c.out_path.empty()) {
    // No -o: the map itself goes to stdout so it can be piped onward.
    std::cout << xml;
    return kExitOk;
  }
  write_file(c.out_path, xml);
  int leaves = 0;
  for (const agnav::Area& a : campus.graph.areas) {
    leaves += campus.graph.is_leaf(a);
  }
  const json j = {{"file", c.out_path},
                  {"bytes", xml.size()},
                  {"areas", campus.graph.areas.size()},
                  {"leaves", leaves},
                  {"passages", campus.graph.passages.size()},
                  {"rooms", campus.n_rooms},
                  {"corridors", campus.n_corridors},
                  {"doors", campus.n_doors},
                  {"junctions", campus.n_junctions},
                  {"vertical_passages", campus.n_vertical_passages},
                  {"floors", o.floors},
                  {"map_hash", agnav::content_hash(campus.graph)}};
  if (c.pretty) {
    std::cout << kv_table({{"file", c.out_path},
                           {"areas", std::to_string(campus.graph.areas.size())},
                           {"leaves", std::to_string(leaves)},
                           {"passages",
                            std::to_string(campus.graph.passages.size())},
                           {"bytes", std::to_string(xml.size())}});
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return kExitOk;
}

struct StorageOpts {
  double resolution = 0.05;
  double spacing = 0.1;
  int bytes_per_point = 12;
};

int run_storage(const CommonOpts& c, const StorageOpts& o) {
  const agnav::AreaGraph g = load_map(c.map_path, c.lenient);
  const agnav::StorageReport r =
      agnav::storage_report(g, o.resolution, o.spacing, o.bytes_per_point);
  const json j = {{"vector_bytes", r.vector_bytes},
                  {"grid_bytes", r.grid_bytes},
                  {"pointcloud_bytes", r.pointcloud_bytes},
                  {"grid_resolution", r.grid_resolution},
                  {"free_area_m2", r.free_area_m2},
                  {"cloud_point_spacing", r.cloud_point_spacing},
                  {"cloud_bytes_per_point", r.cloud_bytes_per_point},
                  {"pointcloud_is_estimate", r.pointcloud_is_estimate},
                  {"grid_over_vector", r.grid_over_vector},
                  {"pointcloud_over_vector", r.pointcloud_over_vector}};
  emit(j, c.out_path, c.pretty,
       kv_table({{"vector_bytes", std::to_string(r.vector_bytes)},
                 {"grid_bytes", std::to_string(r.grid_bytes)},
                 {"pointcloud_bytes (estimate)",
                  std::to_string(r.pointcloud_bytes)},
                 {"grid_over_vector", fmt(r.grid_over_vector, 1)},
                 {"pointcloud_over_vector", fmt(r.pointcloud_over_vector, 1)},
                 {"free_area_m2", fmt(r.free_area_m2, 1)}}));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agnav map, planning and localization toolbench"};
  app.require_subcommand(1);

  CommonOpts common;
  auto add_common = [&](CLI::App* sub, bool with_map = true) {
    if (with_map) {
      sub->add_option("map", common.map_path, "osmAG map file")->required();
      sub->add_flag("--lenient", common.lenient,
                    "accept legacy tag spellings and map them to canonical keys");
    }
    sub->add_option("-o,--output", common.out_path, "write JSON report here");
    sub->add_flag("--pretty", common.pretty, "human-readable summary on stdout");
  };

  CLI::App* validate = app.add_subcommand("validate", "check map structural invariants");
  add_common(validate);

  CLI::App* build_graph =
      app.add_subcommand("build-graph", "precompute and save the routing cache");
  std::string cache_out;
  add_common(build_graph);
  build_graph->add_option("--cache-out", cache_out, "cache file path")->required();

  CLI::App* plan = app.add_subcommand("plan", "route between two poses");
  PlanOpts plan_opts;
  add_common(plan);
  plan->add_option("--start", plan_opts.start_arg, "x,y,level")->required();
  plan->add_option("--goal", plan_opts.goal_arg, "x,y,level")->required();
  plan->add_option("--planner", plan_opts.planner, "flat | hier | grid")
      ->default_val("hier");
  plan->add_option("--cache", plan_opts.cache_path, "routing cache from build-graph");
  plan->add_option("--res", plan_opts.resolution, "grid planner resolution, m")
      ->default_val(0.05);
  plan->add_flag("--with-path", plan_opts.with_path, "include the dense path");

  CLI::App* gen_queries =
      app.add_subcommand("gen-queries", "sample a benchmark query set");
  GenQueriesOpts gq_opts;
  add_common(gen_queries);
  gen_queries->add_option("--count", gq_opts.count)->default_val(100);
  gen_queries->add_option("--seed", gq_opts.seed)->default_val(1);
  gen_queries->add_option("--cross-fraction", gq_opts.cross_fraction,
                          "share of cross-floor queries")
      ->default_val(0.2);
  gen_queries->add_option("--margin", gq_opts.margin, "wall clearance, m")
      ->default_val(0.3);
  gen_queries->add_option("--min-separation", gq_opts.min_separation)
      ->default_val(1.0);

  CLI::App* bench = app.add_subcommand("bench", "compare planners on a query set");
  BenchOpts bench_opts;
  add_common(bench);
  bench->add_option("queries", bench_opts.queries_path, "query set from gen-queries")
      ->required();
  bench->add_option("--orders", bench_opts.orders, "shuffled execution orders")
      ->default_val(6);
  bench->add_option("--res", bench_opts.resolution, "grid baseline resolution, m")
      ->default_val(0.05);
  bench->add_option("--planners", bench_opts.planners, "subset of flat,hier,grid")
      ->delimiter(',');
  bench->add_option("--jobs", bench_opts.jobs, "worker count; 1 = serial timing")
      ->default_val(1);

  CLI::App* ablate = app.add_subcommand("ablate", "paired cached/uncached planning");
  std::string ablate_queries;
  int ablate_trials = 5;
  add_common(ablate);
  ablate->add_option("queries", ablate_queries, "query set from gen-queries")
      ->required();
  ablate->add_option("--trials", ablate_trials, "paired trials per query")
      ->default_val(5);

  CLI::App* raster = app.add_subcommand("raster", "rasterize a floor or local window");
  RasterOpts raster_opts;
  add_common(raster);
  raster->add_option("--level", raster_opts.level, "floor label; empty = all");
  raster->add_option("--window", raster_opts.window_arg,
                     "x,y,size_m for a rolling window instead of the full floor");
  raster->add_option("--res", raster_opts.resolution)->default_val(0.05);
  raster->add_option("--base", raster_opts.base,
                     "write <base>.pgm and <base>.yaml");

  CLI::App* simulate = app.add_subcommand("simulate", "plan and execute a mission");
  SimulateOpts sim_opts;
  add_common(simulate);
  simulate->add_option("--start", sim_opts.start_arg, "x,y,level")->required();
  simulate->add_option("--goal", sim_opts.goal_arg, "x,y,level")->required();
  simulate->add_option("--speed", sim_opts.speed, "m/s")->default_val(1.0);
  simulate->add_option("--seed", sim_opts.seed)->default_val(1);
  simulate->add_option("--trajectory-out", sim_opts.trajectory_out,
                       "CSV of the executed path");

  CLI::App* localize =
      app.add_subcommand("localize-sim", "replay a trajectory through the tracker");
  LocalizeOpts loc_opts;
  add_common(localize);
  localize->add_option("--trajectory", loc_opts.trajectory_path,
                       "CSV rows: t,x,y,theta[,level]")
      ->required();
  localize->add_option("--level", loc_opts.default_level,
                       "floor for rows without one")
      ->default_val("1");
  localize->add_option("--beams", loc_opts.beams)->default_val(360);
  localize->add_option("--sigma", loc_opts.sigma, "range noise, m")->default_val(0.02);
  localize->add_option("--max-range", loc_opts.max_range)->default_val(12.0);
  localize->add_option("--odom-drift", loc_opts.odom_drift,
                       "translation noise fraction per step")
      ->default_val(0.02);
  localize->add_option("--odom-drift-rot", loc_opts.odom_drift_rot,
                       "heading noise, rad per meter")
      ->default_val(0.002);
  localize->add_option("--seed", loc_opts.seed)->default_val(1);
  localize->add_option("--poses-out", loc_opts.poses_out, "per-frame CSV");

  CLI::App* gen_map = app.add_subcommand("gen-map", "generate a synthetic campus");
  GenMapOpts gm_opts;
  add_common(gen_map, /*with_map=*/false);
  gen_map->add_option("--seed", gm_opts.seed)->default_val(1);
  gen_map->add_option("--floors", gm_opts.floors)->default_val(3);
  gen_map->add_option("--sectors", gm_opts.sectors, "corridor segments per floor")
      ->default_val(4);
  gen_map->add_option("--rooms-per-side", gm_opts.rooms_per_side)->default_val(5);
  gen_map->add_option("--room-w", gm_opts.room_w)->default_val(6.0);
  gen_map->add_option("--room-d", gm_opts.room_d)->default_val(8.0);
  gen_map->add_option("--corridor-w", gm_opts.corridor_w)->default_val(3.0);
  gen_map->add_option("--door-w", gm_opts.door_w)->default_val(1.0);
  gen_map->add_flag("--no-elevator", gm_opts.no_elevator);
  gen_map->add_flag("--no-stairs", gm_opts.no_stairs);

  CLI::App* storage = app.add_subcommand("storage", "map representation size report");
  StorageOpts st_opts;
  add_common(storage);
  storage->add_option("--res", st_opts.resolution, "grid resolution, m")
      ->default_val(0.05);
  storage->add_option("--spacing", st_opts.spacing, "point cloud spacing, m")
      ->default_val(0.1);
  storage->add_option("--bytes-per-point", st_opts.bytes_per_point)->default_val(12);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(validate)) return run_validate(common);
    if (app.got_subcommand(build_graph)) return run_build_graph(common, cache_out);
    if (app.got_subcommand(plan)) return run_plan(common, plan_opts);
    if (app.got_subcommand(gen_queries)) return run_gen_queries(common, gq_opts);
    if (app.got_subcommand(bench)) return run_bench(common, bench_opts);
    if (app.got_subcommand(ablate))
      return run_ablate(common, ablate_queries, ablate_trials);
    if (app.got_subcommand(raster)) return run_raster(common, raster_opts);
    if (app.got_subcommand(simulate)) return run_simulate(common, sim_opts);
    if (app.got_subcommand(localize)) return run_localize_sim(common, loc_opts);
    if (app.got_subcommand(gen_map)) return run_gen_map(common, gm_opts);
    if (app.got_subcommand(storage)) return run_storage(common, st_opts);
  } catch (const CliError& e) {
    std::cerr << "navbench: " << e.message << "\n";
    return e.code;
  } catch (const agnav::ParseError& e) {
    std::cerr << "navbench: " << e.what() << "\n";
    return kExitValidation;
  } catch (const agnav::Error& e) {
    std::cerr << "navbench: " << e.what() << "\n";
    return kExitPlanning;
  } catch (const std::exception& e) {
    std::cerr << "navbench: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
