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
// Hand-rolled OSM text builder for test fixtures. Deliberately separate
// from the library writer so that parser tests do not depend on it.

#ifndef AGNAV_TESTS_TEST_MAPS_HPP
#define AGNAV_TESTS_TEST_MAPS_HPP

#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "agnav/area_graph.hpp"
#include "agnav/geometry.hpp"

namespace agtest {

using agnav::Vec2;

class MapBuilder {
 public:
  explicit MapBuilder(agnav::GeoRef ref = {31.0, 121.0}) : ref_(ref) {
    nodes_ << "  <node id=\"1\" lat=\"" << fmt(ref_.lat_deg) << "\" lon=\""
           << fmt(ref_.lon_deg) << "\">\n    <tag k=\"name\" v=\"root\"/>\n  </node>\n";
  }

  long long add_node(const Vec2& p) {
    double lat = 0.0, lon = 0.0;
    agnav::from_local(ref_, p, lat, lon);
    // Quantize to the written precision so coincident points share a node.
    long long key_lat = std::llround(lat * 1e7);
    long long key_lon = std::llround(lon * 1e7);
    auto it = node_ids_.find({key_lat, key_lon});
    if (it != node_ids_.end()) return it->second;
    long long id = next_node_++;
    node_ids_[{key_lat, key_lon}] = id;
    nodes_ << "  <node id=\"" << id << "\" lat=\"" << fmt(lat) << "\" lon=\"" << fmt(lon)
           << "\"/>\n";
    return id;
  }

  void add_area(const std::string& name, const std::string& type,
                const std::string& parent, const std::string& level,
                const std::vector<Vec2>& ring, const std::string& height = "",
                const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    long long id = next_way_++;
    ways_ << "  <way id=\"" << id << "\">\n";
    std::vector<long long> refs;
    for (const Vec2& p : ring) refs.push_back(add_node(p));
    for (long long r : refs) ways_ << "    <nd ref=\"" << r << "\"/>\n";
    if (!refs.empty()) ways_ << "    <nd ref=\"" << refs.front() << "\"/>\n";
    tag("osmAG:type", "area");
    tag("osmAG:areaType", type);
    tag("name", name);
    if (!parent.empty()) tag("osmAG:parent", parent);
    if (!level.empty()) tag("level", level);
    if (!height.empty()) tag("height", height);
    for (const auto& [k, v] : extra) tag(k, v);
    ways_ << "  </way>\n";
  }

  void add_passage(const std::string& name, const std::string& from, const std::string& to,
                   const std::string& level, const std::vector<Vec2>& pts,
                   const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    long long id = next_way_++;
    ways_ << "  <way id=\"" << id << "\">\n";
    for (const Vec2& p : pts) ways_ << "    <nd ref=\"" << add_node(p) << "\"/>\n";
    tag("osmAG:type", "passage");
    tag("name", name);
    tag("osmAG:from", from);
    tag("osmAG:to", to);
    if (!level.empty()) tag("level", level);
    for (const auto& [k, v] : extra) tag(k, v);
    ways_ << "  </way>\n";
  }

  /// Verbatim way body, for malformed-input tests.
  void add_raw_way(const std::string& body) {
    ways_ << "  <way id=\"" << next_way_++ << "\">\n" << body << "  </way>\n";
  }

  std::string xml(bool with_root = true) const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<osm version=\"0.6\" "
           "generator=\"test\">\n";
    if (with_root) out << nodes_.str();
    else {
      // Drop the anchor node but keep the rest.
      std::string all = nodes_.str();
      std::size_t cut = all.find("</node>\n");
      out << all.substr(cut + 8);
    }
    out << ways_.str() << "</osm>\n";
    return out.str();
  }

  agnav::GeoRef ref() const { return ref_; }

 private:
  static std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.7f", v);
    return buf;
  }

  void tag(const std::string& k, const std::string& v) {
    ways_ << "    <tag k=\"" << k << "\" v=\"" << v << "\"/>\n";
  }

  agnav::GeoRef ref_;
  long long next_node_ = 2;
  long long next_way_ = 100;
  std::map<std::pair<long long, long long>, long long> node_ids_;
  std::ostringstream nodes_;
  std::ostringstream ways_;
};

inline std::vector<Vec2> rect(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

/// Two rooms flanking a corridor inside one structure, all on floor 1.
///
///   +----------+----------+
///   |   R1     |   R2     |      rooms: y in [3, 9]
///   +--d1------+------d2--+
///   |        C1           |      corridor: y in [0, 3]
///   +---------------------+
inline std::string two_room_map() {
  MapBuilder b;
  b.add_area("B1", "structure", "", "1", rect(0, 0, 20, 9));
  b.add_area("R1", "room", "B1", "1", rect(0, 3, 10, 9));
  b.add_area("R2", "room", "B1", "1", rect(10, 3, 20, 9));
  b.add_area("C1", "corridor", "B1", "1", rect(0, 0, 20, 3));
  b.add_passage("d1", "R1", "C1", "1", {{2.0, 3.0}, {3.0, 3.0}});
  b.add_passage("d2", "R2", "C1", "1", {{17.0, 3.0}, {18.0, 3.0}});
  return b.xml();
}

}  // namespace agtest

#endif  // AGNAV_TESTS_TEST_MAPS_HPP
