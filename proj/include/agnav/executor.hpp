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
// Segmented route execution. A planned route is handed to a local
// navigator one passage at a time: the active goal is the next passage
// center, or its projection onto the current rolling window when the
// passage lies beyond it. The simulator drives a point robot along the
// dense path with jittered speed, switching goals and refreshing the
// window as it goes, and logs every dispatch for inspection.

#ifndef AGNAV_EXECUTOR_HPP
#define AGNAV_EXECUTOR_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "agnav/area_graph.hpp"
#include "agnav/geometry.hpp"
#include "agnav/hier_planner.hpp"
#include "agnav/raster.hpp"
#include "agnav/rng.hpp"

namespace agnav {

struct MissionConfig {
  double speed = 1.0;           // nominal forward speed, m/s
  double speed_sigma = 0.02;    // per step gaussian speed jitter, m/s
  double dt = 0.1;              // simulation step, s
  double switch_radius = 0.5;   // advance to the next goal inside this range
  double window_size = kWindowSizeM;
  double window_res = kWindowRes;
  double refresh_margin = 10.0;  // recenter when this close to the window edge
  double proxy_margin = 2.0;     // projected goals keep this far inside
  double max_sim_time = 3600.0;  // s
  std::uint64_t seed = 1;
};

struct RouteWaypoint {
  Vec2 pos;
  std::string passage;      // empty for the final goal
  std::string level_after;  // floor once this waypoint is passed
  bool vertical = false;
};

struct GoalDispatch {
  double t = 0.0;
  Vec2 pos;            // what the local navigator would receive
  Vec2 true_goal;      // the waypoint itself
  bool proxy = false;  // true when pos was pulled back into the window
  std::string passage;
  int window_id = 0;
};

struct WindowRecord {
  Vec2 center;
  std::string level;
  BBox bounds;
};

struct MissionResult {
  bool completed = false;
  std::string failure;
  double sim_time = 0.0;
  double distance = 0.0;
  int goal_switches = 0;   // dispatched waypoints, one per passage plus the goal
  int proxy_updates = 0;   // re-projections after window refreshes
  int window_refreshes = 0;
  double mean_abs_speed_err = 0.0;
  double max_abs_speed_err = 0.0;
  std::vector<GoalDispatch> goals;
  std::vector<WindowRecord> windows;
  std::vector<Pose2D> trajectory;
};

/// Pulls \p target back along the sight line from \p robot until it lies
/// inside the square window of half extent \p half around \p center.
/// \p robot itself is assumed inside; targets already inside come back
/// unchanged.
inline Vec2 project_goal_to_window(const Vec2& center, double half, const Vec2& robot,
                                   const Vec2& target) {
  const Vec2 lo{center.x - half, center.y - half};
  const Vec2 hi{center.x + half, center.y + half};
  if (target.x >= lo.x && target.x <= hi.x && target.y >= lo.y && target.y <= hi.y) {
    return target;
  }
  const Vec2 d = target - robot;
  double t = 1.0;
  if (std::abs(d.x) > 1e-12) {
    t = std::min(t, ((d.x > 0.0 ? hi.x : lo.x) - robot.x) / d.x);
  }
  if (std::abs(d.y) > 1e-12) {
    t = std::min(t, ((d.y > 0.0 ? hi.y : lo.y) - robot.y) / d.y);
  }
  t = std::clamp(t, 0.0, 1.0);
  return robot + t * d;
}

/// Waypoint chain for a planned route: one entry per passage in order,
/// annotated with the floor on the far side, then the goal position.
inline std::vector<RouteWaypoint> route_waypoints(const AreaGraph& g, const PlanResult& plan,
                                                  const std::string& start_leaf) {
  std::vector<RouteWaypoint> out;
  std::string cur = start_leaf;
  for (const std::string& name : plan.passages) {
    const Passage& p = g.passage(name);
    RouteWaypoint wp;
    wp.pos = p.center;
    wp.passage = name;
    cur = p.other_area(cur);
    const Area* next = g.find_area(cur);
    wp.level_after = next ? next->level : "";
    wp.vertical = p.level.find(';') != std::string::npos;
    out.push_back(std::move(wp));
  }
  RouteWaypoint goal;
  goal.pos = plan.dense_path.back();
  goal.level_after = out.empty() ? std::string() : out.back().level_after;
  out.push_back(std::move(goal));
  return out;
}

inline MissionResult simulate_mission(const AreaGraph& g, const PlanResult& plan,
                                      const std::string& start_leaf,
                                      const MissionConfig& cfg = {}) {
  MissionResult out;
  if (!plan.success || plan.dense_path.size() < 2) {
    out.failure = "no executable plan";
    return out;
  }
  const std::vector<Vec2>& dense = plan.dense_path;
  const double total = polyline_length(dense);
  std::vector<RouteWaypoint> wps = route_waypoints(g, plan, start_leaf);

  std::mt19937_64 rng(cfg.seed);
  const double half = 0.5 * cfg.window_size;
  WindowConfig wcfg;
  wcfg.size_m = cfg.window_size;
  wcfg.resolution = cfg.window_res;

  std::string level;
  if (const Area* a = g.find_area(start_leaf)) level = a->level;

  auto open_window = [&](const Vec2& center) {
    RollingWindow win = extract_window(g, center, wcfg, level);
    WindowRecord rec;
    rec.center = center;
    rec.level = level;
    rec.bounds.expand(win.grid.origin);
    rec.bounds.expand(win.grid.origin + Vec2{win.grid.width * win.grid.resolution,
                                             win.grid.height * win.grid.resolution});
    out.windows.push_back(rec);
    return static_cast<int>(out.windows.size()) - 1;
  };

  Vec2 pos = dense.front();
  int window_id = open_window(pos);
  std::size_t wp_idx = 0;

  auto dispatch = [&](bool is_switch) {
    const RouteWaypoint& wp = wps[wp_idx];
    const WindowRecord& win = out.windows[window_id];
    GoalDispatch gd;
    gd.t = out.sim_time;
    gd.true_goal = wp.pos;
    gd.pos = project_goal_to_window(win.center, half - cfg.proxy_margin, pos, wp.pos);
    gd.proxy = (gd.pos - wp.pos).squared_norm() > 1e-18;
    gd.passage = wp.passage;
    gd.window_id = window_id;
    out.goals.push_back(gd);
    if (is_switch) {
      ++out.goal_switches;
    } else {
      ++out.proxy_updates;
    }
  };
  dispatch(true);

  double s = 0.0;
  double err_sum = 0.0;
  long steps = 0;
  out.trajectory.push_back({pos.x, pos.y, 0.0, level});

  while (s < total - 1e-9) {
    if (out.sim_time > cfg.max_sim_time) {
      out.failure = "mission timed out";
      break;
    }
    double speed = cfg.speed + rand_gauss(rng) * cfg.speed_sigma;
    speed = std::clamp(speed, 0.2 * cfg.speed, 2.0 * cfg.speed);
    const double err = std::abs(speed - cfg.speed);
    err_sum += err;
    out.max_abs_speed_err = std::max(out.max_abs_speed_err, err);
    ++steps;

    const Vec2 prev = pos;
    s = std::min(total, s + speed * cfg.dt);
    out.sim_time += cfg.dt;
    pos = polyline_point_at(dense, s);
    const Vec2 delta = pos - prev;
    const double heading = delta.squared_norm() > 1e-18
                               ? std::atan2(delta.y, delta.x)
                               : out.trajectory.back().theta;
    out.trajectory.push_back({pos.x, pos.y, heading, level});

    // Waypoint switching; coincident waypoints (elevator chains) cascade.
    while (wp_idx < wps.size() && (pos - wps[wp_idx].pos).norm() <= cfg.switch_radius) {
      const RouteWaypoint& wp = wps[wp_idx];
      if (!wp.level_after.empty() && wp.level_after != level) {
        level = wp.level_after;
        window_id = open_window(pos);
        ++out.window_refreshes;
      }
      ++wp_idx;
      if (wp_idx < wps.size()) dispatch(true);
    }

    // Keep the window under the robot.
    const WindowRecord& win = out.windows[window_id];
    const double cheb =
        std::max(std::abs(pos.x - win.center.x), std::abs(pos.y - win.center.y));
    if (cheb > half - cfg.refresh_margin) {
      window_id = open_window(pos);
      ++out.window_refreshes;
      if (wp_idx < wps.size()) dispatch(false);  // refine the proxy goal
    }
  }

  out.distance = s;
  if (steps > 0) out.mean_abs_speed_err = err_sum / static_cast<double>(steps);
  if (out.failure.empty()) {
    // The final waypoint sits at the path end, so it must have been
    // consumed by the switch loop on the last step.
    out.completed = wp_idx == wps.size();
    if (!out.completed) out.failure = "route ended before the final goal";
  }
  return out;
}

}  // namespace agnav

#endif  // AGNAV_EXECUTOR_HPP
