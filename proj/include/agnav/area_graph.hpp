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
// Hierarchical area map model: areas (closed polygons) arranged in a
// parent forest, and passages (polylines) connecting pairs of areas.
// Geometry is kept both as raw WGS84 node references (for lossless
// rewriting) and as local metric coordinates around the map anchor.

#ifndef AGNAV_AREA_GRAPH_HPP
#define AGNAV_AREA_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "agnav/errors.hpp"
#include "agnav/geometry.hpp"
#include "agnav/osm_xml.hpp"

namespace agnav {

inline constexpr double kEarthRadiusM = 6378137.0;
inline constexpr double kMaxAnchorLatDeg = 89.0;

/// WGS84 anchor of the local tangent-plane frame.
struct GeoRef {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
};

inline double deg2rad(double d) { return d * M_PI / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / M_PI; }

/// Equirectangular projection around the anchor. Scale in x uses the
/// anchor latitude, which is accurate to millimetres at building scale.
inline Vec2 to_local(const GeoRef& ref, double lat_deg, double lon_deg) {
  if (std::abs(ref.lat_deg) >= kMaxAnchorLatDeg) throw PolarLatitudeError(ref.lat_deg);
  double x = kEarthRadiusM * std::cos(deg2rad(ref.lat_deg)) * deg2rad(lon_deg - ref.lon_deg);
  double y = kEarthRadiusM * deg2rad(lat_deg - ref.lat_deg);
  return {x, y};
}

inline void from_local(const GeoRef& ref, const Vec2& p, double& lat_deg, double& lon_deg) {
  if (std::abs(ref.lat_deg) >= kMaxAnchorLatDeg) throw PolarLatitudeError(ref.lat_deg);
  lat_deg = ref.lat_deg + rad2deg(p.y / kEarthRadiusM);
  lon_deg = ref.lon_deg + rad2deg(p.x / (kEarthRadiusM * std::cos(deg2rad(ref.lat_deg))));
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

enum class AreaType { kRoom, kCorridor, kStructure, kElevator, kStairs };

inline const char* to_string(AreaType t) {
  switch (t) {
    case AreaType::kRoom: return "room";
    case AreaType::kCorridor: return "corridor";
    case AreaType::kStructure: return "structure";
    case AreaType::kElevator: return "elevator";
    case AreaType::kStairs: return "stairs";
  }
  return "room";
}

inline std::optional<AreaType> area_type_from_string(std::string_view s) {
  if (s == "room") return AreaType::kRoom;
  if (s == "corridor") return AreaType::kCorridor;
  if (s == "structure") return AreaType::kStructure;
  if (s == "elevator") return AreaType::kElevator;
  if (s == "stairs") return AreaType::kStairs;
  return std::nullopt;
}

struct OsmNode {
  long long id = 0;
  double lat = 0.0;
  double lon = 0.0;
  std::vector<std::pair<std::string, std::string>> tags;
};

struct Area {
  long long way_id = 0;
  std::string name;
  AreaType type = AreaType::kRoom;
  std::string parent;  // empty for forest roots
  std::string level;   // floor label, optional
  std::string height;  // original tag text, optional
  std::vector<long long> node_refs;  // open ring, counter clockwise
  std::vector<Vec2> ring;            // local metric, same order as node_refs
  BBox bbox;
  std::vector<std::pair<std::string, std::string>> extra_tags;

  bool is_structure() const { return type == AreaType::kStructure; }
  bool is_vertical() const {
    return type == AreaType::kElevator || type == AreaType::kStairs;
  }
  double height_m() const {
    return height.empty() ? 0.0 : std::strtod(height.c_str(), nullptr);
  }
  Vec2 centroid() const { return polygon_centroid(ring); }
};

struct Passage {
  long long way_id = 0;
  std::string name;
  std::string from;
  std::string to;
  std::string level;  // optional; "a;b" marks a connection spanning floors
  std::vector<long long> node_refs;
  std::vector<Vec2> pts;  // local metric polyline
  std::vector<std::pair<std::string, std::string>> extra_tags;
  Vec2 center;    // arclength midpoint of pts
  double length = 0.0;

  /// True when the other side of \p area_name, e.g. the area a door leads to.
  const std::string& other_area(const std::string& area_name) const {
    return from == area_name ? to : from;
  }
};

struct ParseOptions {
  /// Accept the legacy lower-case area type spelling.
  bool lenient = false;
};

class AreaGraph {
 public:
  GeoRef georef;
  long long root_node_id = 0;
  std::vector<OsmNode> nodes;  // sorted by id
  std::vector<Area> areas;
  std::vector<Passage> passages;

  // Derived indexes, rebuilt by reindex().
  std::unordered_map<long long, int> node_index;
  std::unordered_map<std::string, int> area_index;
  std::unordered_map<std::string, int> passage_index;
  std::unordered_map<std::string, std::vector<int>> children_of;
  std::unordered_map<std::string, std::vector<int>> passages_of_area;
  std::vector<int> root_areas;

  void reindex() {
    std::sort(nodes.begin(), nodes.end(),
              [](const OsmNode& a, const OsmNode& b) { return a.id < b.id; });
    node_index.clear();
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) node_index[nodes[i].id] = i;
    area_index.clear();
    children_of.clear();
    root_areas.clear();
    for (int i = 0; i < static_cast<int>(areas.size()); ++i) area_index[areas[i].name] = i;
    for (int i = 0; i < static_cast<int>(areas.size()); ++i) {
      const Area& a = areas[i];
      if (!a.parent.empty() && area_index.count(a.parent)) {
        children_of[a.parent].push_back(i);
      } else {
        root_areas.push_back(i);
      }
    }
    passage_index.clear();
    passages_of_area.clear();
    for (int i = 0; i < static_cast<int>(passages.size()); ++i) {
      passage_index[passages[i].name] = i;
      passages_of_area[passages[i].from].push_back(i);
      if (passages[i].to != passages[i].from) passages_of_area[passages[i].to].push_back(i);
    }
  }

  const Area& area(const std::string& name) const {
    auto it = area_index.find(name);
    if (it == area_index.end()) throw UnknownAreaError(name);
    return areas[it->second];
  }

  const Area* find_area(const std::string& name) const {
    auto it = area_index.find(name);
    return it == area_index.end() ? nullptr : &areas[it->second];
  }

  const Passage& passage(const std::string& name) const {
    auto it = passage_index.find(name);
    if (it == passage_index.end()) throw UnknownAreaError(name);
    return passages[it->second];
  }

  const std::vector<int>& children(const std::string& name) const {
    static const std::vector<int> kEmpty;
    auto it = children_of.find(name);
    return it == children_of.end() ? kEmpty : it->second;
  }

  const std::vector<int>& passages_in(const std::string& area_name) const {
    static const std::vector<int> kEmpty;
    auto it = passages_of_area.find(area_name);
    return it == passages_of_area.end() ? kEmpty : it->second;
  }

  bool is_leaf(const Area& a) const { return children(a.name).empty(); }

  std::vector<int> leaf_indices() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(areas.size()); ++i) {
      if (is_leaf(areas[i])) out.push_back(i);
    }
    return out;
  }

  /// Chain from \p name up to its forest root, starting with \p name
  /// itself. Guarded against parent cycles.
  std::vector<std::string> ancestor_chain(const std::string& name) const {
    std::vector<std::string> chain;
    std::unordered_set<std::string> seen;
    const Area* a = &area(name);
    for (;;) {
      if (!seen.insert(a->name).second) break;  // cycle, stop
      chain.push_back(a->name);
      if (a->parent.empty()) break;
      const Area* p = find_area(a->parent);
      if (!p) break;  // dangling parent, treat as root
      a = p;
    }
    return chain;
  }

  int depth(const std::string& name) const {
    return static_cast<int>(ancestor_chain(name).size()) - 1;
  }

  int max_depth() const {
    int d = 0;
    for (const Area& a : areas) d = std::max(d, depth(a.name));
    return d;
  }

  /// Lowest common ancestor by name; nullopt when the two areas live in
  /// different trees of the forest.
  std::optional<std::string> lca(const std::string& a, const std::string& b) const {
    std::vector<std::string> ca = ancestor_chain(a);
    std::unordered_set<std::string> in_a(ca.begin(), ca.end());
    for (const std::string& anc : ancestor_chain(b)) {
      if (in_a.count(anc)) return anc;
    }
    return std::nullopt;
  }

  /// Leaf area containing \p p. Points exactly on a shared wall are
  /// resolved to the lexicographically smallest candidate name so the
  /// answer is deterministic. If \p level is non-empty only areas
  /// labelled with that floor are considered.
  std::string locate_leaf_area(const Vec2& p, const std::string& level = "") const {
    constexpr double kBoundaryTol = 1e-9;
    std::vector<const Area*> strict, boundary;
    for (const Area& a : areas) {
      if (!is_leaf(a)) continue;
      if (!level.empty() && a.level != level) continue;
      if (!a.bbox.contains(p) && distance_to_polygon_boundary(a.ring, p) > kBoundaryTol) continue;
      if (point_strictly_in_polygon(a.ring, p, kBoundaryTol)) {
        strict.push_back(&a);
      } else if (point_in_polygon_tol(a.ring, p, kBoundaryTol)) {
        boundary.push_back(&a);
      }
    }
    if (strict.size() == 1) return strict.front()->name;
    if (strict.size() > 1) {
      throw AmbiguousContainmentError("point inside " + std::to_string(strict.size()) +
                                      " leaf areas");
    }
    if (!boundary.empty()) {
      const Area* best = boundary.front();
      for (const Area* a : boundary) {
        if (a->name < best->name) best = a;
      }
      return best->name;
    }
    throw NotInAnyAreaError("(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")");
  }

  BBox map_bbox() const {
    BBox box;
    for (const Area& a : areas) box.expand(a.bbox);
    for (const Passage& p : passages) {
      for (const Vec2& v : p.pts) box.expand(v);
    }
    return box;
  }
};

namespace detail {

inline const std::string* find_tag(
    const std::vector<std::pair<std::string, std::string>>& tags, std::string_view key) {
  for (const auto& [k, v] : tags) {
    if (k == key) return &v;
  }
  return nullptr;
}

inline double parse_double(const std::string& text, const char* what, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError(ParseErrorCode::kMalformedXml,
                     std::string("bad ") + what + " value '" + text + "' near line " +
                         std::to_string(line));
  }
}

inline long long parse_id(const std::string& text, const char* what, int line) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError(ParseErrorCode::kMalformedXml,
                     std::string("bad ") + what + " id '" + text + "' near line " +
                         std::to_string(line));
  }
}

}  // namespace detail

inline AreaGraph parse_osmag(const std::string& text, const ParseOptions& opt = {}) {
  xml::Reader reader(text);
  xml::Element el;

  struct RawWay {
    long long id = 0;
    int line = 0;
    std::vector<long long> nd_refs;
    std::vector<std::pair<std::string, std::string>> tags;
  };

  AreaGraph g;
  std::vector<RawWay> ways;
  bool saw_osm = false;
  bool found_root = false;

  for (;;) {
    xml::Event ev = reader.next(el);
    if (ev == xml::Event::kEof) break;
    if (ev == xml::Event::kEnd) continue;
    if (el.name == "osm") {
      saw_osm = true;
      continue;
    }
    if (!saw_osm) {
      throw ParseError(ParseErrorCode::kMalformedXml,
                       "expected <osm> document, found <" + el.name + "> at line " +
                           std::to_string(el.line));
    }
    if (el.name == "node") {
      OsmNode n;
      const std::string* id = el.attr("id");
      const std::string* lat = el.attr("lat");
      const std::string* lon = el.attr("lon");
      if (!id || !lat || !lon) {
        throw ParseError(ParseErrorCode::kMalformedXml,
                         "node missing id/lat/lon at line " + std::to_string(el.line));
      }
      n.id = detail::parse_id(*id, "node", el.line);
      n.lat = detail::parse_double(*lat, "lat", el.line);
      n.lon = detail::parse_double(*lon, "lon", el.line);
      if (!el.self_closing) {
        xml::Element sub;
        for (;;) {
          xml::Event sev = reader.next(sub);
          if (sev == xml::Event::kEof) {
            throw ParseError(ParseErrorCode::kMalformedXml, "unterminated <node>");
          }
          if (sev == xml::Event::kEnd && sub.name == "node") break;
          if (sev == xml::Event::kStart && sub.name == "tag") {
            const std::string* k = sub.attr("k");
            const std::string* v = sub.attr("v");
            if (k && v) n.tags.emplace_back(*k, *v);
            if (!sub.self_closing) reader.skip_element();
          } else if (sev == xml::Event::kStart && !sub.self_closing) {
            reader.skip_element();
          }
        }
      }
      const std::string* nm = detail::find_tag(n.tags, "name");
      if (nm && *nm == "root") {
        if (found_root) {
          throw ParseError(ParseErrorCode::kDuplicateName,
                           "second anchor node tagged name=root at line " +
                               std::to_string(el.line));
        }
        found_root = true;
        g.root_node_id = n.id;
        g.georef = GeoRef{n.lat, n.lon};
      }
      g.nodes.push_back(std::move(n));
      continue;
    }
    if (el.name == "way") {
      RawWay w;
      w.line = el.line;
      const std::string* id = el.attr("id");
      if (!id) {
        throw ParseError(ParseErrorCode::kMalformedXml,
                         "way missing id at line " + std::to_string(el.line));
      }
      w.id = detail::parse_id(*id, "way", el.line);
      if (!el.self_closing) {
        xml::Element sub;
        for (;;) {
          xml::Event sev = reader.next(sub);
          if (sev == xml::Event::kEof) {
            throw ParseError(ParseErrorCode::kMalformedXml, "unterminated <way>");
          }
          if (sev == xml::Event::kEnd && sub.name == "way") break;
          if (sev == xml::Event::kStart && sub.name == "nd") {
            const std::string* ref = sub.attr("ref");
            if (!ref) {
              throw ParseError(ParseErrorCode::kMalformedXml,
                               "nd missing ref at line " + std::to_string(sub.line));
            }
            w.nd_refs.push_back(detail::parse_id(*ref, "nd", sub.line));
            if (!sub.self_closing) reader.skip_element();
          } else if (sev == xml::Event::kStart && sub.name == "tag") {
            const std::string* k = sub.attr("k");
            const std::string* v = sub.attr("v");
            if (k && v) w.tags.emplace_back(*k, *v);
            if (!sub.self_closing) reader.skip_element();
          } else if (sev == xml::Event::kStart && !sub.self_closing) {
            reader.skip_element();
          }
        }
      }
      ways.push_back(std::move(w));
      continue;
    }
    // Relations and anything else are ignored.
    if (!el.self_closing) reader.skip_element();
  }

  if (!saw_osm) {
    throw ParseError(ParseErrorCode::kMalformedXml, "no <osm> element found");
  }
  if (!found_root) {
    throw ParseError(ParseErrorCode::kMissingRoot, "no anchor node tagged name=root");
  }

  std::unordered_map<long long, const OsmNode*> node_by_id;
  for (const OsmNode& n : g.nodes) {
    if (!node_by_id.emplace(n.id, &n).second) {
      throw ParseError(ParseErrorCode::kMalformedXml,
                       "duplicate node id " + std::to_string(n.id));
    }
  }

  std::unordered_set<std::string> used_names;
  auto claim_name = [&](const std::string& name, int line) {
    if (!used_names.insert(name).second) {
      throw ParseError(ParseErrorCode::kDuplicateName,
                       "name '" + name + "' reused near line " + std::to_string(line));
    }
  };

  auto resolve = [&](long long ref, int line) -> const OsmNode* {
    auto it = node_by_id.find(ref);
    if (it == node_by_id.end()) {
      throw ParseError(ParseErrorCode::kDanglingNodeRef,
                       "nd ref " + std::to_string(ref) + " has no node, way near line " +
                           std::to_string(line));
    }
    return it->second;
  };

  for (RawWay& w : ways) {
    const std::string* type = detail::find_tag(w.tags, "osmAG:type");
    if (!type) continue;  // plain OSM way, not part of the area map
    const std::string* name = detail::find_tag(w.tags, "name");
    if (!name || name->empty()) {
      throw ParseError(ParseErrorCode::kMissingRequiredTag,
                       "way " + std::to_string(w.id) + " has no name tag");
    }

    if (*type == "area") {
      Area a;
      a.way_id = w.id;
      a.name = *name;
      claim_name(a.name, w.line);
      const std::string* at = detail::find_tag(w.tags, "osmAG:areaType");
      if (!at) {
        const std::string* legacy = detail::find_tag(w.tags, "osmAG:areatype");
        if (legacy && opt.lenient) {
          at = legacy;
        } else if (legacy) {
          throw ParseError(ParseErrorCode::kMissingRequiredTag,
                           "area '" + a.name +
                               "' uses legacy tag osmAG:areatype; rename it to "
                               "osmAG:areaType or parse with lenient mode");
        } else {
          throw ParseError(ParseErrorCode::kMissingRequiredTag,
                           "area '" + a.name + "' has no osmAG:areaType tag");
        }
      }
      std::optional<AreaType> t = area_type_from_string(*at);
      if (!t) {
        throw ParseError(ParseErrorCode::kMissingRequiredTag,
                         "area '" + a.name + "' has unknown osmAG:areaType '" + *at + "'");
      }
      a.type = *t;
      if (const std::string* p = detail::find_tag(w.tags, "osmAG:parent")) a.parent = *p;
      if (const std::string* l = detail::find_tag(w.tags, "level")) a.level = *l;
      if (const std::string* h = detail::find_tag(w.tags, "height")) a.height = *h;
      for (const auto& [k, v] : w.tags) {
        if (k == "osmAG:type" || k == "osmAG:areaType" || k == "osmAG:areatype" ||
            k == "name" || k == "osmAG:parent" || k == "level" || k == "height") {
          continue;
        }
        a.extra_tags.emplace_back(k, v);
      }

      a.node_refs = w.nd_refs;
      if (a.node_refs.size() >= 2 && a.node_refs.front() == a.node_refs.back()) {
        a.node_refs.pop_back();  // store the ring open
      }
      if (a.node_refs.size() < 3) {
        throw ParseError(ParseErrorCode::kDegenerateGeometry,
                         "area '" + a.name + "' has fewer than 3 distinct vertices");
      }
      for (long long ref : a.node_refs) {
        const OsmNode* n = resolve(ref, w.line);
        a.ring.push_back(to_local(g.georef, n->lat, n->lon));
      }
      if (std::abs(polygon_signed_area(a.ring)) < 1e-9) {
        throw ParseError(ParseErrorCode::kDegenerateGeometry,
                         "area '" + a.name + "' has zero enclosed area");
      }
      if (!polygon_is_ccw(a.ring)) {
        std::reverse(a.ring.begin(), a.ring.end());
        std::reverse(a.node_refs.begin(), a.node_refs.end());
      }
      a.bbox = bbox_of(a.ring);
      g.areas.push_back(std::move(a));
    } else if (*type == "passage") {
      Passage p;
      p.way_id = w.id;
      p.name = *name;
      claim_name(p.name, w.line);
      const std::string* from = detail::find_tag(w.tags, "osmAG:from");
      const std::string* to = detail::find_tag(w.tags, "osmAG:to");
      if (!from || !to || from->empty() || to->empty()) {
        throw ParseError(ParseErrorCode::kMissingRequiredTag,
                         "passage '" + p.name + "' needs osmAG:from and osmAG:to");
      }
      if (*from == *to) {
        throw ParseError(ParseErrorCode::kInvalidPassage,
                         "passage '" + p.name + "' connects area '" + *from + "' to itself");
      }
      p.from = *from;
      p.to = *to;
      if (const std::string* l = detail::find_tag(w.tags, "level")) p.level = *l;
      for (const auto& [k, v] : w.tags) {
        if (k == "osmAG:type" || k == "name" || k == "osmAG:from" || k == "osmAG:to" ||
            k == "level") {
          continue;
        }
        p.extra_tags.emplace_back(k, v);
      }
      p.node_refs = w.nd_refs;
      if (p.node_refs.size() < 2) {
        throw ParseError(ParseErrorCode::kDegenerateGeometry,
                         "passage '" + p.name + "' needs at least 2 points");
      }
      for (long long ref : p.node_refs) {
        const OsmNode* n = resolve(ref, w.line);
        p.pts.push_back(to_local(g.georef, n->lat, n->lon));
      }
      p.length = polyline_length(p.pts);
      p.center = polyline_midpoint(p.pts);
      g.passages.push_back(std::move(p));
    } else {
      throw ParseError(ParseErrorCode::kMalformedXml,
                       "way " + std::to_string(w.id) + " has unknown osmAG:type '" + *type +
                           "'");
    }
  }

  g.reindex();
  return g;
}

inline AreaGraph load_osmag(const std::string& path, const ParseOptions& opt = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open map file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_osmag(buf.str(), opt);
}

/// Canonical serialization: nodes then ways sorted by id, known tags in a
/// fixed order followed by extra tags sorted by key. Writing, parsing and
/// writing again yields byte-identical text.
inline std::string write_osmag(const AreaGraph& g) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<osm version=\"0.6\" generator=\"agnav\">\n";

  std::vector<const OsmNode*> nodes;
  nodes.reserve(g.nodes.size());
  for (const OsmNode& n : g.nodes) nodes.push_back(&n);
  std::sort(nodes.begin(), nodes.end(),
            [](const OsmNode* a, const OsmNode* b) { return a->id < b->id; });
  for (const OsmNode* n : nodes) {
    out << "  <node id=\"" << n->id << "\" lat=\"" << xml::format_coord(n->lat)
        << "\" lon=\"" << xml::format_coord(n->lon) << "\"";
    std::vector<std::pair<std::string, std::string>> tags = n->tags;
    std::sort(tags.begin(), tags.end());
    if (tags.empty()) {
      out << "/>\n";
    } else {
      out << ">\n";
      for (const auto& [k, v] : tags) {
        out << "    <tag k=\"" << xml::escape_attr(k) << "\" v=\"" << xml::escape_attr(v)
            << "\"/>\n";
      }
      out << "  </node>\n";
    }
  }

  struct WayRef {
    long long id;
    bool is_area;
    int idx;
  };
  std::vector<WayRef> ways;
  for (int i = 0; i < static_cast<int>(g.areas.size()); ++i) {
    ways.push_back({g.areas[i].way_id, true, i});
  }
  for (int i = 0; i < static_cast<int>(g.passages.size()); ++i) {
    ways.push_back({g.passages[i].way_id, false, i});
  }
  std::sort(ways.begin(), ways.end(),
            [](const WayRef& a, const WayRef& b) { return a.id < b.id; });

  auto write_tag = [&out](const std::string& k, const std::string& v) {
    out << "    <tag k=\"" << xml::escape_attr(k) << "\" v=\"" << xml::escape_attr(v)
        << "\"/>\n";
  };

  for (const WayRef& w : ways) {
    out << "  <way id=\"" << w.id << "\">\n";
    if (w.is_area) {
      const Area& a = g.areas[w.idx];
      for (long long ref : a.node_refs) out << "    <nd ref=\"" << ref << "\"/>\n";
      if (!a.node_refs.empty()) out << "    <nd ref=\"" << a.node_refs.front() << "\"/>\n";
      write_tag("osmAG:type", "area");
      write_tag("osmAG:areaType", to_string(a.type));
      write_tag("name", a.name);
      if (!a.parent.empty()) write_tag("osmAG:parent", a.parent);
      if (!a.level.empty()) write_tag("level", a.level);
      if (!a.height.empty()) write_tag("height", a.height);
      std::vector<std::pair<std::string, std::string>> extras = a.extra_tags;
      std::sort(extras.begin(), extras.end());
      for (const auto& [k, v] : extras) write_tag(k, v);
    } else {
      const Passage& p = g.passages[w.idx];
      for (long long ref : p.node_refs) out << "    <nd ref=\"" << ref << "\"/>\n";
      write_tag("osmAG:type", "passage");
      write_tag("name", p.name);
      write_tag("osmAG:from", p.from);
      write_tag("osmAG:to", p.to);
      if (!p.level.empty()) write_tag("level", p.level);
      std::vector<std::pair<std::string, std::string>> extras = p.extra_tags;
      std::sort(extras.begin(), extras.end());
      for (const auto& [k, v] : extras) write_tag(k, v);
    }
    out << "  </way>\n";
  }
  out << "</osm>\n";
  return out.str();
}

inline void save_osmag(const AreaGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write map file: " + path);
  out << write_osmag(g);
}

/// Stable content fingerprint over the canonical serialization. Used to
/// pair cache files with the map they were built from.
inline std::uint64_t content_hash(const AreaGraph& g) { return fnv1a64(write_osmag(g)); }

/// Strict floor comparison: labels must be non-empty and equal.
inline bool same_floor(const std::string& level_a, const std::string& level_b) {
  return !level_a.empty() && level_a == level_b;
}

}  // namespace agnav

#endif  // AGNAV_AREA_GRAPH_HPP
