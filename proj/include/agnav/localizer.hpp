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
// Structure-based 2D localization against leaf-area walls. A scan frame is
// gated against the map (returns that cannot belong to permanent structure
// are dropped), matched point-to-line, and solved with Gauss-Newton under
// asymmetric robust weights plus an optional corridor-aware direction
// factor. The result is fused with an odometry prediction by confidence,
// and a coarse-to-fine scorer provides global relocalization when tracking
// has no prior.

#ifndef AGNAV_LOCALIZER_HPP
#define AGNAV_LOCALIZER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "agnav/area_graph.hpp"
#include "agnav/errors.hpp"
#include "agnav/geometry.hpp"
#include "agnav/scan_sim.hpp"

namespace agnav {

/// Which side of its matched wall a point falls on, judged by the wall's
/// area-interior normal.
enum class PointSide : std::uint8_t { kInside, kOutside };

/// How gate weights enter the least-squares solve. Weights are always
/// computed; this only controls what the solver multiplies in.
enum class WeightMode : std::uint8_t { kOff, kRobustOnly, kRobustTimesCorridor };

struct TrackerConfig {
  double tau_in = 0.3;    // gate half-width on the interior side, meters
  double tau_out = 1.0;   // gate half-width on the exterior side, meters
  double max_step_translation = 0.3;  // per-iteration clamp, meters
  double max_step_rotation = 0.35;    // per-iteration clamp, radians
  int corridor_bins = 18;             // wall-orientation histogram resolution
  double corridor_dominance = 0.8;    // top-bin fraction that flags a corridor
  int corridor_axial_cap = 60;        // dominant-direction points kept per solve
  int max_iterations = 30;
  double convergence_eps = 1e-6;      // increment below which iteration stops
  double jump_translation = 1.0;      // frame-level guard vs the prior, meters
  double jump_rotation = 30.0 * std::numbers::pi / 180.0;
  WeightMode weight_mode = WeightMode::kRobustTimesCorridor;
  int min_correspondences = 10;
  double max_odom_extrapolation = 0.5;  // seconds past the newest sample

  /// Points farther than this from every wall are left unmatched.
  double match_radius() const { return 2.0 * tau_out; }
};

/// One gated scan return matched to a wall.
struct Correspondence {
  int beam = -1;     // index into ScanFrame::beams
  int segment = -1;  // index into the wall set
  Vec2 point;        // world frame under the pose estimate
  double range_gap = 0.0;        // measured minus expected range along the beam
  double d_perp = 0.0;           // distance to the matched segment, meters
  double signed_residual = 0.0;  // inward-normal component, for the solver
  PointSide side = PointSide::kInside;
  double w_robust = 0.0;
  double dir_factor = 1.0;
  double weight = 0.0;  // what the solver uses, per WeightMode
};

struct GateResult {
  std::vector<Correspondence> retained;
  int finite_beams = 0;  // returns inside the range cap, matched or not
};

/// Distance-decaying weight; exterior-side points decay six times faster
/// because structure rarely explains returns behind a wall.
inline double robust_weight(double r, PointSide side, const TrackerConfig& cfg) {
  if (side == PointSide::kOutside) return cfg.tau_out / (9.0 * r + cfg.tau_out);
  return cfg.tau_in / (1.5 * r + cfg.tau_in);
}

/// Emphasis on beams that look across their matched wall rather than along
/// it. Grazing observations keep a 0.3 floor so they still constrain.
inline double direction_factor(const Vec2& wall_normal, const Vec2& beam_dir) {
  return std::clamp(std::abs(wall_normal.dot(beam_dir)), 0.3, 1.0);
}

/// Matches each finite return to its nearest wall and keeps the ones that
/// are geometrically compatible with permanent structure: returns at or in
/// front of the expected wall must lie within tau_in of it, returns beyond
/// the expected wall within tau_out.
inline GateResult clutter_filter(const ScanFrame& scan,
                                 const std::vector<MapSegment>& walls,
                                 const Pose2D& pose, const TrackerConfig& cfg) {
  GateResult out;
  const Vec2 o = pose.position();
  for (std::size_t bi = 0; bi < scan.beams.size(); ++bi) {
    const Beam& beam = scan.beams[bi];
    if (beam.range >= scan.max_range) continue;
    ++out.finite_beams;
    const double wa = pose.theta + beam.angle;
    const Vec2 dir{std::cos(wa), std::sin(wa)};
    const Vec2 p = o + dir * beam.range;

    int seg = -1;
    double best = cfg.match_radius();
    for (std::size_t i = 0; i < walls.size(); ++i) {
      const double d = distance_to_segment(walls[i].a, walls[i].b, p);
      if (d < best) {
        best = d;
        seg = static_cast<int>(i);
      }
    }
    if (seg < 0) continue;

    // Expected range along this beam; a miss leaves it +inf and the gap
    // -inf, which lands in the strict interior branch below.
    const double d_map = raycast_walls(walls, o, dir);
    const double e = beam.range - d_map;
    const bool retain = (e <= 0.0 && best < cfg.tau_in) || (e > 0.0 && best < cfg.tau_out);
    if (!retain) continue;

    const MapSegment& w = walls[static_cast<std::size_t>(seg)];
    Correspondence c;
    c.beam = static_cast<int>(bi);
    c.segment = seg;
    c.point = p;
    c.range_gap = e;
    c.d_perp = best;
    c.signed_residual = w.inward_normal.dot(p - w.a);
    c.side = c.signed_residual >= 0.0 ? PointSide::kInside : PointSide::kOutside;
    c.w_robust = robust_weight(c.d_perp, c.side, cfg);
    c.dir_factor = direction_factor(w.inward_normal, dir);
    switch (cfg.weight_mode) {
      case WeightMode::kOff: c.weight = 1.0; break;
      case WeightMode::kRobustOnly: c.weight = c.w_robust; break;
      case WeightMode::kRobustTimesCorridor: c.weight = c.w_robust * c.dir_factor; break;
    }
    out.retained.push_back(c);
  }
  return out;
}

struct CorridorInfo {
  double dominant_angle = 0.0;  // matched-wall orientation mod pi, radians
  double dominance = 0.0;       // top-bin fraction of all matched points
  std::vector<char> drop;       // 1 = surplus dominant-direction point
};

/// Orientation histogram of the matched walls. When one direction holds
/// more than the dominance threshold, surplus points on it are marked for
/// dropping so cross-axis evidence is never drowned out; cross-axis points
/// are never marked.
inline CorridorInfo corridorness(const std::vector<Correspondence>& corrs,
                                 const std::vector<MapSegment>& walls,
                                 const TrackerConfig& cfg) {
  CorridorInfo out;
  out.drop.assign(corrs.size(), 0);
  if (corrs.empty()) return out;
  const int bins = std::max(1, cfg.corridor_bins);
  const double width = std::numbers::pi / bins;
  std::vector<int> mass(static_cast<std::size_t>(bins), 0);
  std::vector<int> bin_of(corrs.size());
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const MapSegment& w = walls[static_cast<std::size_t>(corrs[i].segment)];
    const Vec2 d = w.b - w.a;
    double ang = std::atan2(d.y, d.x);
    if (ang < 0.0) ang += std::numbers::pi;
    // Bin edges are shifted half a bin so near-axis orientations on either
    // side of zero share one bin instead of straddling the wraparound.
    double shifted = std::fmod(ang + 0.5 * width, std::numbers::pi);
    if (shifted < 0.0) shifted += std::numbers::pi;
    int bin = static_cast<int>(shifted / width);
    bin = std::clamp(bin, 0, bins - 1);
    bin_of[i] = bin;
    ++mass[static_cast<std::size_t>(bin)];
  }
  int top = 0;
  for (int b = 1; b < bins; ++b) {
    if (mass[static_cast<std::size_t>(b)] > mass[static_cast<std::size_t>(top)]) top = b;
  }
  out.dominance = static_cast<double>(mass[static_cast<std::size_t>(top)]) /
                  static_cast<double>(corrs.size());
  out.dominant_angle = top * width;

  const int cap = std::max(1, cfg.corridor_axial_cap);
  if (out.dominance > cfg.corridor_dominance &&
      mass[static_cast<std::size_t>(top)] > cap) {
    std::vector<std::size_t> axial;
    for (std::size_t i = 0; i < corrs.size(); ++i) {
      if (bin_of[i] == top) axial.push_back(i);
    }
    const std::size_t m = axial.size();
    std::vector<char> keep(m, 0);
    for (int j = 0; j < cap; ++j) {
      keep[static_cast<std::size_t>(j) * m / static_cast<std::size_t>(cap)] = 1;
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (!keep[k]) out.drop[axial[k]] = 1;
    }
  }
  return out;
}

enum class TrackStatus : std::uint8_t { kOk, kDiverged, kTooFewCorrespondences };

inline const char* to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::kOk: return "Ok";
    case TrackStatus::kDiverged: return "Diverged";
    case TrackStatus::kTooFewCorrespondences: return "TooFewCorrespondences";
  }
  return "Unknown";
}

struct IcpReport {
  int iterations = 0;
  bool converged = false;
  double final_step_translation = 0.0;
  double final_step_rotation = 0.0;
  double max_step_translation_seen = 0.0;
  int correspondences = 0;  // retained at the final pose
  int finite_beams = 0;
  double valid_ratio = 0.0;
  double mean_residual = 0.0;
  double weight_variance = 0.0;
  double corridor_dominance = 0.0;
  bool corridor_active = false;  // downsampling engaged in some iteration
};

struct TrackResult {
  TrackStatus status = TrackStatus::kOk;
  Pose2D pose;
  double s_icp = 0.0;
  IcpReport report;

  bool ok() const { return status == TrackStatus::kOk; }
};

namespace detail {

/// Gaussian elimination with partial pivoting for the 3x3 normal system.
inline bool solve3(double h[3][3], const double b[3], double out[3]) {
  double a[3][4];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a[r][c] = h[r][c];
    a[r][3] = -b[r];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-14) return false;
    if (piv != col) {
      for (int c = col; c < 4; ++c) std::swap(a[piv][c], a[col][c]);
    }
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = a[r][3];
    for (int c = r + 1; c < 3; ++c) s -= a[r][c] * out[c];
    out[r] = s / a[r][r];
  }
  return true;
}

}  // namespace detail

/// Point-to-line scan matching seeded at \p prior. Each iteration re-gates
/// and re-matches, solves the weighted normal equations for a rigid
/// increment, and clamps the increment. A frame-level guard rejects final
/// poses implausibly far from the prior; the returned pose then stays at
/// the prior.
inline TrackResult icp_track(const ScanFrame& scan,
                             const std::vector<MapSegment>& walls,
                             const Pose2D& prior, const TrackerConfig& cfg) {
  TrackResult res;
  res.pose = prior;
  Pose2D cur = prior;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    ++res.report.iterations;
    GateResult gate = clutter_filter(scan, walls, cur, cfg);
    if (static_cast<int>(gate.retained.size()) < cfg.min_correspondences) {
      res.status = TrackStatus::kTooFewCorrespondences;
      res.report.finite_beams = gate.finite_beams;
      res.report.correspondences = static_cast<int>(gate.retained.size());
      res.pose = prior;
      return res;
    }

    std::vector<char> drop(gate.retained.size(), 0);
    if (cfg.weight_mode == WeightMode::kRobustTimesCorridor) {
      const CorridorInfo ci = corridorness(gate.retained, walls, cfg);
      res.report.corridor_dominance = ci.dominance;
      if (ci.dominance > cfg.corridor_dominance) {
        drop = ci.drop;
        res.report.corridor_active = true;
      }
    }

    double h[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double b[3] = {0, 0, 0};
    for (std::size_t i = 0; i < gate.retained.size(); ++i) {
      if (drop[i]) continue;
      const Correspondence& c = gate.retained[i];
      const Vec2 n = walls[static_cast<std::size_t>(c.segment)].inward_normal;
      const Vec2 u = c.point - cur.position();
      const double row[3] = {n.x, n.y, u.x * n.y - u.y * n.x};
      for (int r = 0; r < 3; ++r) {
        for (int cc = 0; cc < 3; ++cc) h[r][cc] += c.weight * row[r] * row[cc];
        b[r] += c.weight * row[r] * c.signed_residual;
      }
    }
    for (int r = 0; r < 3; ++r) h[r][r] += 1e-10;

    double d[3] = {0, 0, 0};
    if (!detail::solve3(h, b, d)) break;

    double tn = std::hypot(d[0], d[1]);
    if (tn > cfg.max_step_translation) {
      const double f = cfg.max_step_translation / tn;
      d[0] *= f;
      d[1] *= f;
      tn = cfg.max_step_translation;
    }
    d[2] = std::clamp(d[2], -cfg.max_step_rotation, cfg.max_step_rotation);

    cur.x += d[0];
    cur.y += d[1];
    cur.theta = normalize_angle(cur.theta + d[2]);
    res.report.final_step_translation = tn;
    res.report.final_step_rotation = std::abs(d[2]);
    res.report.max_step_translation_seen =
        std::max(res.report.max_step_translation_seen, tn);
    if (tn <= cfg.convergence_eps && std::abs(d[2]) <= cfg.convergence_eps) {
      res.report.converged = true;
      break;
    }
  }

  // Confidence statistics over the association at the final pose.
  const GateResult gate = clutter_filter(scan, walls, cur, cfg);
  res.report.finite_beams = gate.finite_beams;
  res.report.correspondences = static_cast<int>(gate.retained.size());
  if (!gate.retained.empty() && gate.finite_beams > 0) {
    double sum_r = 0.0, sum_w = 0.0, sum_w2 = 0.0;
    for (const Correspondence& c : gate.retained) {
      sum_r += c.d_perp;
      sum_w += c.weight;
      sum_w2 += c.weight * c.weight;
    }
    const double n = static_cast<double>(gate.retained.size());
    res.report.valid_ratio =
        std::clamp(n / static_cast<double>(gate.finite_beams), 0.0, 1.0);
    res.report.mean_residual = sum_r / n;
    const double mean_w = sum_w / n;
    res.report.weight_variance =
        std::clamp(sum_w2 / n - mean_w * mean_w, 0.0, 1.0);
    res.s_icp = std::clamp(res.report.valid_ratio *
                               std::exp(-res.report.mean_residual / cfg.tau_in) *
                               (1.0 - res.report.weight_variance),
                           0.0, 1.0);
  }

  const double jump_t = (cur.position() - prior.position()).norm();
  const double jump_r = std::abs(angle_diff(prior.theta, cur.theta));
  if (jump_t > cfg.jump_translation || jump_r > cfg.jump_rotation) {
    res.status = TrackStatus::kDiverged;
    res.pose = prior;
    res.s_icp = 0.0;
    return res;
  }
  res.pose = cur;
  return res;
}

struct FusionInput {
  Pose2D icp_pose;
  double s_icp = 0.0;
  Pose2D odom_pose;  // odometry prediction at the scan timestamp
};

/// Trust put on the scan match; never below 0.5, never above 0.95.
inline double icp_fusion_weight(double s_icp) {
  return 0.5 + 0.45 * std::clamp(s_icp, 0.0, 1.0);
}

/// Convex blend of the two pose sources: translations averaged by weight,
/// heading swept from the odometry heading toward the scan-match heading.
inline Pose2D fuse_with_odometry(const FusionInput& in) {
  const double w = icp_fusion_weight(in.s_icp);
  Pose2D out;
  out.x = w * in.icp_pose.x + (1.0 - w) * in.odom_pose.x;
  out.y = w * in.icp_pose.y + (1.0 - w) * in.odom_pose.y;
  out.theta = normalize_angle(in.odom_pose.theta +
                              w * angle_diff(in.odom_pose.theta, in.icp_pose.theta));
  out.level = in.icp_pose.level.empty() ? in.odom_pose.level : in.icp_pose.level;
  return out;
}

struct OdomSample {
  double t = 0.0;
  Pose2D pose;
};

/// Pose at \p t from a time-sorted odometry buffer: linear interpolation
/// between bracketing samples, constant-velocity extrapolation up to
/// \p max_extrapolation seconds past the newest one. Anything else throws
/// StaleOdometryError.
inline Pose2D predict_from_odometry(const std::vector<OdomSample>& buf, double t,
                                    double max_extrapolation = 0.5) {
  if (buf.empty()) throw StaleOdometryError("empty odometry buffer");
  if (t < buf.front().t - 1e-12) {
    throw StaleOdometryError("query predates the odometry buffer");
  }
  if (t <= buf.front().t) return buf.front().pose;

  if (t > buf.back().t) {
    const double dt = t - buf.back().t;
    if (dt > max_extrapolation + 1e-12) {
      throw StaleOdometryError("odometry is stale by " + std::to_string(dt) + " s");
    }
    if (buf.size() < 2) return buf.back().pose;
    const OdomSample& p = buf[buf.size() - 2];
    const OdomSample& q = buf.back();
    const double h = q.t - p.t;
    if (h <= 0.0) return q.pose;
    Pose2D out = q.pose;
    out.x += (q.pose.x - p.pose.x) / h * dt;
    out.y += (q.pose.y - p.pose.y) / h * dt;
    out.theta = normalize_angle(q.pose.theta +
                                angle_diff(p.pose.theta, q.pose.theta) / h * dt);
    return out;
  }

  std::size_t hi = 1;
  while (buf[hi].t < t) ++hi;
  const OdomSample& p = buf[hi - 1];
  const OdomSample& q = buf[hi];
  const double h = q.t - p.t;
  const double f = h > 0.0 ? (t - p.t) / h : 1.0;
  Pose2D out;
  out.x = p.pose.x + (q.pose.x - p.pose.x) * f;
  out.y = p.pose.y + (q.pose.y - p.pose.y) * f;
  out.theta = normalize_angle(p.pose.theta + angle_diff(p.pose.theta, q.pose.theta) * f);
  out.level = q.pose.level.empty() ? p.pose.level : q.pose.level;
  return out;
}

struct RelocConfig {
  double grid_pitch = 1.0;       // candidate lattice spacing, meters
  double angular_step = 10.0 * std::numbers::pi / 180.0;
  int min_beams = 30;            // finite returns required to even try
  int refine_count = 2;          // strongest distinct modes reported
  int refine_attempts = 8;       // shortlist length fed to refinement
  double mode_separation = 2.0;  // meters between reported modes
  int coarse_stride = 4;         // beam decimation during the sweep
  int max_candidates = 3000;     // lattice positions across all areas
  double boundary_margin = 0.3;  // candidates keep this clear of walls
  double score_epsilon = 1e-2;   // floors the accumulated residual
};

struct PoseHypothesis {
  Pose2D pose;
  double score = 0.0;
  std::string area;
  bool refined = false;
};

/// Structural consistency of a candidate pose: inverse accumulated gated
/// residual, discounted when the inside/outside split is lopsided or few
/// beams find support.
inline double relocalization_score(const ScanFrame& scan,
                                   const std::vector<MapSegment>& walls,
                                   const Pose2D& pose, const TrackerConfig& cfg,
                                   double score_epsilon = 1e-2) {
  const GateResult g = clutter_filter(scan, walls, pose, cfg);
  if (g.finite_beams == 0 || g.retained.empty()) return 0.0;
  double accum = 0.0;
  int n_in = 0, n_out = 0;
  for (const Correspondence& c : g.retained) {
    accum += c.d_perp;
    (c.side == PointSide::kInside ? n_in : n_out)++;
  }
  const double base = 1.0 / (score_epsilon + accum);
  const double total = static_cast<double>(n_in + n_out);
  const double balance = std::max(0.2, 1.0 - std::abs(n_in - n_out) / total);
  const double support =
      static_cast<double>(g.retained.size()) / static_cast<double>(g.finite_beams);
  return base * balance * support;
}

/// Pose recovery with no prior: sweep a sparse position lattice and coarse
/// heading set over leaf-area interiors, score structural consistency,
/// then refine the strongest well-separated modes with the tracker. An
/// empty result means no hypothesis survived.
inline std::vector<PoseHypothesis> global_relocalize(const ScanFrame& scan,
                                                     const AreaGraph& g,
                                                     const std::string& level_hint,
                                                     const TrackerConfig& tcfg = {},
                                                     const RelocConfig& rcfg = {}) {
  if (scan.finite_count() < rcfg.min_beams) return {};

  std::set<std::string> levels;
  if (!level_hint.empty()) {
    levels.insert(level_hint);
  } else {
    for (const Area& a : g.areas) {
      if (g.is_leaf(a) && !a.is_structure()) levels.insert(a.level);
    }
  }

  // Decimated copy for the sweep stage; refinement sees the full frame.
  ScanFrame coarse;
  coarse.timestamp = scan.timestamp;
  coarse.max_range = scan.max_range;
  coarse.true_pose = scan.true_pose;
  for (std::size_t i = 0; i < scan.beams.size();
       i += static_cast<std::size_t>(std::max(1, rcfg.coarse_stride))) {
    coarse.beams.push_back(scan.beams[i]);
  }

  // The lattice and heading grid put honest candidates up to half a cell and
  // half an angular step away from the truth. The sweep gate opens by that
  // displacement bound, otherwise the gate rejects the very beams that should
  // vote for the true cell and scattered junk poses outrank it.
  double sweep_slack = 0.5 * std::numbers::sqrt2 * rcfg.grid_pitch;
  {
    std::vector<double> finite;
    for (const Beam& b : coarse.beams) {
      if (b.range < coarse.max_range) finite.push_back(b.range);
    }
    if (!finite.empty()) {
      std::nth_element(finite.begin(), finite.begin() + finite.size() / 2,
                       finite.end());
      sweep_slack += 0.5 * rcfg.angular_step * finite[finite.size() / 2];
    }
  }
  TrackerConfig sweep_cfg = tcfg;
  sweep_cfg.tau_in += sweep_slack;
  sweep_cfg.tau_out += sweep_slack;

  struct Candidate {
    Pose2D pose;
    double score;
    std::string area;
  };
  std::vector<Candidate> scored;
  std::unordered_map<std::string, std::vector<MapSegment>> walls_by_level;

  for (const std::string& level : levels) {
    const std::vector<MapSegment>& walls =
        walls_by_level.emplace(level, structure_segments(g, level)).first->second;
    struct Spot {
      Vec2 p;
      const Area* area;
    };
    std::vector<Spot> spots;
    for (const Area& a : g.areas) {
      if (!g.is_leaf(a) || a.is_structure() || a.level != level) continue;
      const double x0 = a.bbox.min.x + rcfg.grid_pitch * 0.5;
      const double y0 = a.bbox.min.y + rcfg.grid_pitch * 0.5;
      for (double y = y0; y <= a.bbox.max.y; y += rcfg.grid_pitch) {
        for (double x = x0; x <= a.bbox.max.x; x += rcfg.grid_pitch) {
          const Vec2 p{x, y};
          if (!point_strictly_in_polygon(a.ring, p, 1e-9)) continue;
          if (distance_to_polygon_boundary(a.ring, p) < rcfg.boundary_margin) continue;
          spots.push_back({p, &a});
        }
      }
    }
    std::size_t stride = 1;
    if (rcfg.max_candidates > 0 && spots.size() > static_cast<std::size_t>(rcfg.max_candidates)) {
      stride = (spots.size() + static_cast<std::size_t>(rcfg.max_candidates) - 1) /
               static_cast<std::size_t>(rcfg.max_candidates);
    }
    const int headings =
        std::max(1, static_cast<int>(std::lround(2.0 * std::numbers::pi / rcfg.angular_step)));
    for (std::size_t si = 0; si < spots.size(); si += stride) {
      for (int k = 0; k < headings; ++k) {
        Pose2D cand;
        cand.x = spots[si].p.x;
        cand.y = spots[si].p.y;
        cand.theta = normalize_angle(-std::numbers::pi + k * rcfg.angular_step);
        cand.level = level;
        const double s =
            relocalization_score(coarse, walls, cand, sweep_cfg, rcfg.score_epsilon);
        if (s > 0.0) scored.push_back({cand, s, spots[si].area->name});
      }
    }
  }
  if (scored.empty()) return {};

  std::sort(scored.begin(), scored.end(),
            [](const Candidate& a, const Candidate& b) { return a.score > b.score; });

  // Greedy spatially diverse shortlist. Distinctness is judged again after
  // refinement: neighbouring cells, and symmetry aliases within one room,
  // tend to slide into the same optimum and must collapse to one mode.
  std::vector<Candidate> shortlist;
  for (const Candidate& c : scored) {
    bool shadowed = false;
    for (const Candidate& m : shortlist) {
      if (m.pose.level == c.pose.level &&
          (m.pose.position() - c.pose.position()).norm() < rcfg.mode_separation) {
        shadowed = true;
        break;
      }
    }
    if (!shadowed) shortlist.push_back(c);
    if (static_cast<int>(shortlist.size()) >=
        std::max(rcfg.refine_count, rcfg.refine_attempts)) {
      break;
    }
  }

  std::vector<PoseHypothesis> out;
  for (const Candidate& m : shortlist) {
    if (static_cast<int>(out.size()) >= rcfg.refine_count) break;
    const std::vector<MapSegment>& walls = walls_by_level.at(m.pose.level);
    PoseHypothesis h;
    h.area = m.area;
    const TrackResult t = icp_track(scan, walls, m.pose, tcfg);
    if (t.ok()) {
      h.pose = t.pose;
      h.refined = true;
    } else {
      h.pose = m.pose;
    }
    bool merged = false;
    for (const PoseHypothesis& e : out) {
      if (e.pose.level == h.pose.level &&
          (e.pose.position() - h.pose.position()).norm() < rcfg.mode_separation) {
        merged = true;
        break;
      }
    }
    if (merged) continue;
    h.score = relocalization_score(scan, walls, h.pose, tcfg, rcfg.score_epsilon);
    out.push_back(h);
  }
  std::sort(out.begin(), out.end(),
            [](const PoseHypothesis& a, const PoseHypothesis& b) { return a.score > b.score; });
  return out;
}

/// Frame-by-frame tracking front end. Owns the odometry buffer and the
/// per-floor wall cache, composes predict / match / fuse per scan. Single
/// owner; step it from one thread at a time.
class Tracker {
 public:
  explicit Tracker(const AreaGraph& g, TrackerConfig cfg = {}) : g_(g), cfg_(cfg) {}

  /// (Re)starts tracking from a known pose.
  void reset(const Pose2D& pose) {
    pose_ = pose;
    initialized_ = true;
    odom_.clear();
    last_odom_.reset();
  }

  bool initialized() const { return initialized_; }
  const Pose2D& pose() const { return pose_; }
  const TrackerConfig& config() const { return cfg_; }

  /// Timestamps must not go backwards; older samples fall off the front.
  void push_odometry(const OdomSample& s) {
    if (!odom_.empty() && s.t < odom_.back().t) {
      throw Error("odometry timestamps must be monotone");
    }
    odom_.push_back(s);
    if (odom_.size() > kOdomKeep) odom_.erase(odom_.begin());
  }

  const std::vector<MapSegment>& walls(const std::string& level) {
    auto it = walls_.find(level);
    if (it == walls_.end()) {
      it = walls_.emplace(level, structure_segments(g_, level)).first;
    }
    return it->second;
  }

  /// Predicts from odometry, corrects with the scan, fuses by confidence.
  /// On a rejected frame the pose coasts on the odometry prediction.
  TrackResult process(const ScanFrame& scan) {
    if (!initialized_) throw Error("tracker has no pose; call reset first");
    Pose2D pred = pose_;
    if (!odom_.empty()) {
      const Pose2D at_scan =
          predict_from_odometry(odom_, scan.timestamp, cfg_.max_odom_extrapolation);
      if (last_odom_) {
        // Relative motion in the previous body frame, replayed from the
        // current estimate; odometry and map frames may disagree globally.
        const Vec2 dw = at_scan.position() - last_odom_->position();
        const double c0 = std::cos(-last_odom_->theta);
        const double s0 = std::sin(-last_odom_->theta);
        const Vec2 db{c0 * dw.x - s0 * dw.y, s0 * dw.x + c0 * dw.y};
        const double dth = angle_diff(last_odom_->theta, at_scan.theta);
        const double c1 = std::cos(pose_.theta);
        const double s1 = std::sin(pose_.theta);
        pred.x = pose_.x + c1 * db.x - s1 * db.y;
        pred.y = pose_.y + s1 * db.x + c1 * db.y;
        pred.theta = normalize_angle(pose_.theta + dth);
      }
      last_odom_ = at_scan;
    }
    TrackResult r = icp_track(scan, walls(pose_.level), pred, cfg_);
    if (r.ok()) {
      Pose2D icp = r.pose;
      icp.level = pose_.level;
      Pose2D odo = pred;
      odo.level = pose_.level;
      pose_ = fuse_with_odometry({icp, r.s_icp, odo});
    } else {
      pose_ = pred;
    }
    return r;
  }

 private:
  static constexpr std::size_t kOdomKeep = 1024;

  const AreaGraph& g_;
  TrackerConfig cfg_;
  Pose2D pose_;
  bool initialized_ = false;
  std::vector<OdomSample> odom_;
  std::optional<Pose2D> last_odom_;
  std::unordered_map<std::string, std::vector<MapSegment>> walls_;
};

}  // namespace agnav

#endif  // AGNAV_LOCALIZER_HPP
