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

#ifndef AGNAV_GEOMETRY_HPP
#define AGNAV_GEOMETRY_HPP

/// \file
/// Planar geometry primitives shared across the stack: points, poses,
/// polygons (stored counter-clockwise), polylines, and the small set of
/// predicates the map model, rasterizer, and localizer rely on.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace agnav {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
  /// Counter-clockwise perpendicular (left normal of a direction vector).
  Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

/// Shortest signed angular difference b - a, wrapped into (-pi, pi].
inline double angle_diff(double a, double b) { return normalize_angle(b - a); }

/// Planar pose with the floor label it lives on. Theta is kept normalized
/// by construction sites, not enforced here.
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  std::string level;

  Vec2 position() const { return {x, y}; }
  Vec2 heading() const { return {std::cos(theta), std::sin(theta)}; }
};

struct BBox {
  Vec2 min{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  Vec2 max{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};

  bool valid() const { return min.x <= max.x && min.y <= max.y; }
  void expand(const Vec2& p) {
    min.x = std::min(min.x, p.x);
    min.y = std::min(min.y, p.y);
    max.x = std::max(max.x, p.x);
    max.y = std::max(max.y, p.y);
  }
  void expand(const BBox& o) {
    expand(o.min);
    expand(o.max);
  }
  void pad(double m) {
    min.x -= m;
    min.y -= m;
    max.x += m;
    max.y += m;
  }
  bool intersects(const BBox& o) const {
    return valid() && o.valid() && min.x <= o.max.x && o.min.x <= max.x &&
           min.y <= o.max.y && o.min.y <= max.y;
  }
  bool contains(const Vec2& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
};

inline BBox bbox_of(const std::vector<Vec2>& pts) {
  BBox b;
  for (const auto& p : pts) b.expand(p);
  return b;
}

// ---------------------------------------------------------------------------
// Segments
// ---------------------------------------------------------------------------

/// Closest point on segment [a,b] to p.
inline Vec2 closest_point_on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len2 = ab.squared_norm();
  if (len2 <= 0.0) return a;
  double t = (p - a).dot(ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return a + ab * t;
}

inline double distance_to_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return (p - closest_point_on_segment(a, b, p)).norm();
}

/// Perpendicular distance from p to the infinite line through a,b.
inline double distance_to_line(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len = ab.norm();
  if (len <= 0.0) return (p - a).norm();
  return std::abs(ab.cross(p - a)) / len;
}

/// True if segments ab and cd cross at a single interior point of both
/// (shared endpoints, touching, and collinear overlap do not count).
inline bool segments_properly_cross(const Vec2& a, const Vec2& b, const Vec2& c,
                                    const Vec2& d) {
  const double d1 = (b - a).cross(c - a);
  const double d2 = (b - a).cross(d - a);
  const double d3 = (d - c).cross(a - c);
  const double d4 = (d - c).cross(b - c);
  return ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) &&
         ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0));
}

/// Intersects the ray origin + t*dir (t >= 0) with segment [a,b].
/// Returns the smallest nonnegative t, or nullopt if the ray misses.
inline std::optional<double> ray_segment_intersection(const Vec2& origin,
                                                      const Vec2& dir,
                                                      const Vec2& a,
                                                      const Vec2& b) {
  const Vec2 seg = b - a;
  const double denom = dir.cross(seg);
  if (std::abs(denom) < 1e-15) return std::nullopt;  // parallel
  const Vec2 ao = a - origin;
  const double t = ao.cross(seg) / denom;
  const double u = ao.cross(dir) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

/// Intersects the ray with the infinite line through a,b. Returns t >= 0.
inline std::optional<double> ray_line_intersection(const Vec2& origin,
                                                   const Vec2& dir, const Vec2& a,
                                                   const Vec2& b) {
  const Vec2 seg = b - a;
  const double denom = dir.cross(seg);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const double t = (a - origin).cross(seg) / denom;
  if (t < 0.0) return std::nullopt;
  return t;
}

/// First hit of a ray against a disc, or nullopt.
inline std::optional<double> ray_disc_intersection(const Vec2& origin,
                                                   const Vec2& dir,
                                                   const Vec2& center,
                                                   double radius) {
  const Vec2 oc = origin - center;
  const double b = oc.dot(dir);
  const double c = oc.squared_norm() - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  double t = -b - sq;
  if (t < 0.0) t = -b + sq;
  if (t < 0.0) return std::nullopt;
  return t;
}

// ---------------------------------------------------------------------------
// Polygons (open rings: last vertex connects back to the first)
// ---------------------------------------------------------------------------

inline double polygon_signed_area(const std::vector<Vec2>& ring) {
  double a = 0.0;
  for (size_t i = 0; i < ring.size(); ++i) {
    const Vec2& p = ring[i];
    const Vec2& q = ring[(i + 1) % ring.size()];
    a += p.cross(q);
  }
  return 0.5 * a;
}

inline bool polygon_is_ccw(const std::vector<Vec2>& ring) {
  return polygon_signed_area(ring) > 0.0;
}

inline Vec2 polygon_centroid(const std::vector<Vec2>& ring) {
  double a = 0.0;
  Vec2 c{0.0, 0.0};
  for (size_t i = 0; i < ring.size(); ++i) {
    const Vec2& p = ring[i];
    const Vec2& q = ring[(i + 1) % ring.size()];
    const double w = p.cross(q);
    a += w;
    c += (p + q) * w;
  }
  if (std::abs(a) < 1e-12) {
    // Degenerate ring: fall back to the vertex mean.
    Vec2 m{0.0, 0.0};
    for (const auto& p : ring) m += p;
    return ring.empty() ? m : m / static_cast<double>(ring.size());
  }
  return c / (3.0 * a);
}

/// Even-odd ray-casting containment test. Points exactly on the boundary
/// are not reliably classified; pair with distance_to_polygon_boundary
/// when boundary tolerance matters.
inline bool point_in_polygon(const std::vector<Vec2>& ring, const Vec2& p) {
  bool inside = false;
  const size_t n = ring.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

inline double distance_to_polygon_boundary(const std::vector<Vec2>& ring,
                                           const Vec2& p) {
  double best = std::numeric_limits<double>::max();
  const size_t n = ring.size();
  for (size_t i = 0; i < n; ++i) {
    best = std::min(best, distance_to_segment(ring[i], ring[(i + 1) % n], p));
  }
  return best;
}

/// Containment with boundary slack: inside, or within tol of the boundary.
inline bool point_in_polygon_tol(const std::vector<Vec2>& ring, const Vec2& p,
                                 double tol) {
  if (point_in_polygon(ring, p)) return true;
  return distance_to_polygon_boundary(ring, p) <= tol;
}

/// Strictly inside with clearance: inside and farther than tol from the
/// boundary. Used by overlap checks that must ignore shared walls.
inline bool point_strictly_in_polygon(const std::vector<Vec2>& ring, const Vec2& p,
                                      double tol) {
  return point_in_polygon(ring, p) && distance_to_polygon_boundary(ring, p) > tol;
}

/// Interior overlap test for two simple polygons that may legitimately share
/// boundary walls. Reports true only on genuine interior intersection:
/// a vertex, edge sample, or centroid of one ring strictly inside the other,
/// or a proper edge crossing. Edge samples matter for axis-aligned rings
/// that overlap in a strip without putting any vertex inside the other.
inline bool polygons_interiors_intersect(const std::vector<Vec2>& a,
                                         const std::vector<Vec2>& b, double tol) {
  auto any_probe_inside = [tol](const std::vector<Vec2>& ring,
                                const std::vector<Vec2>& other) {
    const size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
      const Vec2& p = ring[i];
      const Vec2& q = ring[(i + 1) % n];
      if (point_strictly_in_polygon(other, p, tol)) return true;
      for (double t : {0.25, 0.5, 0.75}) {
        if (point_strictly_in_polygon(other, p + (q - p) * t, tol)) return true;
      }
    }
    return false;
  };
  if (any_probe_inside(a, b) || any_probe_inside(b, a)) return true;
  if (point_strictly_in_polygon(b, polygon_centroid(a), tol)) return true;
  if (point_strictly_in_polygon(a, polygon_centroid(b), tol)) return true;
  const size_t na = a.size(), nb = b.size();
  for (size_t i = 0; i < na; ++i) {
    for (size_t j = 0; j < nb; ++j) {
      if (segments_properly_cross(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb]))
        return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Polylines
// ---------------------------------------------------------------------------

inline double polyline_length(const std::vector<Vec2>& pts) {
  double len = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) len += (pts[i] - pts[i - 1]).norm();
  return len;
}

/// Point at arclength s along the polyline, clamped to its ends.
inline Vec2 polyline_point_at(const std::vector<Vec2>& pts, double s) {
  if (pts.empty()) return {};
  if (s <= 0.0) return pts.front();
  for (size_t i = 1; i < pts.size(); ++i) {
    const double seg = (pts[i] - pts[i - 1]).norm();
    if (s <= seg) {
      if (seg <= 0.0) return pts[i];
      return pts[i - 1] + (pts[i] - pts[i - 1]) * (s / seg);
    }
    s -= seg;
  }
  return pts.back();
}

/// Midpoint of the total arclength; the representative point of a passage.
inline Vec2 polyline_midpoint(const std::vector<Vec2>& pts) {
  return polyline_point_at(pts, 0.5 * polyline_length(pts));
}

}  // namespace agnav

#endif  // AGNAV_GEOMETRY_HPP
