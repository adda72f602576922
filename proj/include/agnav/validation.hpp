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
// Structural validity checks for parsed area maps. A map is usable for
// planning when all four invariants hold: the parent relation forms a
// forest, children stay inside their parents, same-floor siblings do not
// overlap, and every passage joins two known distinct areas.

#ifndef AGNAV_VALIDATION_HPP
#define AGNAV_VALIDATION_HPP

#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "agnav/area_graph.hpp"
#include "agnav/geometry.hpp"

namespace agnav {

/// Slack for the child-inside-parent test. Survey data routinely has
/// shared walls drawn a few centimetres apart.
inline constexpr double kContainSlackM = 0.05;

/// Penetration depth below which two sibling rings are still treated as
/// merely sharing a wall.
inline constexpr double kSiblingOverlapTolM = 0.01;

enum class Invariant { kTree, kContainment, kGeometricConsistency, kPassageAdjacency };

inline const char* to_string(Invariant i) {
  switch (i) {
    case Invariant::kTree: return "Tree";
    case Invariant::kContainment: return "Containment";
    case Invariant::kGeometricConsistency: return "GeometricConsistency";
    case Invariant::kPassageAdjacency: return "PassageAdjacency";
  }
  return "Unknown";
}

struct Violation {
  Invariant invariant;
  std::string subject;  // offending area or passage name
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }

  int count(Invariant i) const {
    int n = 0;
    for (const Violation& v : violations) {
      if (v.invariant == i) ++n;
    }
    return n;
  }
};

namespace detail {

inline void check_tree(const AreaGraph& g, ValidationReport& report) {
  std::set<std::string> reported_cycles;
  for (const Area& a : g.areas) {
    if (!a.parent.empty() && !g.find_area(a.parent)) {
      report.violations.push_back(
          {Invariant::kTree, a.name, "parent '" + a.parent + "' does not exist"});
    }
  }
  for (const Area& a : g.areas) {
    std::vector<std::string> chain;
    std::unordered_set<std::string> on_chain;
    const Area* cur = &a;
    for (;;) {
      if (on_chain.count(cur->name)) {
        // Close the loop: the cycle is the chain suffix starting at cur.
        std::size_t start = 0;
        while (chain[start] != cur->name) ++start;
        std::string key = chain[start];
        for (std::size_t i = start; i < chain.size(); ++i) key = std::min(key, chain[i]);
        if (reported_cycles.insert(key).second) {
          std::string members;
          for (std::size_t i = start; i < chain.size(); ++i) {
            if (!members.empty()) members += " -> ";
            members += chain[i];
          }
          report.violations.push_back(
              {Invariant::kTree, key, "parent cycle: " + members});
        }
        break;
      }
      chain.push_back(cur->name);
      on_chain.insert(cur->name);
      if (cur->parent.empty()) break;
      const Area* p = g.find_area(cur->parent);
      if (!p) break;  // already reported above
      cur = p;
    }
  }
}

inline void check_containment(const AreaGraph& g, ValidationReport& report,
                              double slack) {
  for (const Area& a : g.areas) {
    if (a.parent.empty()) continue;
    const Area* parent = g.find_area(a.parent);
    if (!parent) continue;  // Tree violation already covers this
    int outside = 0;
    double worst = 0.0;
    for (const Vec2& v : a.ring) {
      if (point_in_polygon_tol(parent->ring, v, slack)) continue;
      ++outside;
      worst = std::max(worst, distance_to_polygon_boundary(parent->ring, v));
    }
    if (outside > 0) {
      report.violations.push_back(
          {Invariant::kContainment, a.name,
           std::to_string(outside) + " vertex(es) outside parent '" + parent->name +
               "', worst excursion " + std::to_string(worst) + " m"});
    }
  }
}

inline void check_geometric_consistency(const AreaGraph& g, ValidationReport& report,
                                        double tol) {
  // Group siblings by (parent, level); unlabeled levels group together.
  std::unordered_map<std::string, std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(g.areas.size()); ++i) {
    const Area& a = g.areas[i];
    groups[a.parent + "\x1f" + a.level].push_back(i);
  }
  for (const auto& [key, members] : groups) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const Area& a = g.areas[members[i]];
        const Area& b = g.areas[members[j]];
        if (!a.bbox.intersects(b.bbox)) continue;
        if (polygons_interiors_intersect(a.ring, b.ring, tol)) {
          report.violations.push_back(
              {Invariant::kGeometricConsistency, a.name,
               "interior overlaps sibling '" + b.name + "'"});
        }
      }
    }
  }
}

inline void check_passage_adjacency(const AreaGraph& g, ValidationReport& report) {
  for (const Passage& p : g.passages) {
    if (p.from == p.to) {
      report.violations.push_back(
          {Invariant::kPassageAdjacency, p.name, "connects area '" + p.from + "' to itself"});
      continue;
    }
    if (!g.find_area(p.from)) {
      report.violations.push_back(
          {Invariant::kPassageAdjacency, p.name, "from-area '" + p.from + "' does not exist"});
    }
    if (!g.find_area(p.to)) {
      report.violations.push_back(
          {Invariant::kPassageAdjacency, p.name, "to-area '" + p.to + "' does not exist"});
    }
  }
}

}  // namespace detail

inline ValidationReport validate(const AreaGraph& g, double contain_slack = kContainSlackM,
                                 double sibling_tol = kSiblingOverlapTolM) {
  ValidationReport report;
  detail::check_tree(g, report);
  detail::check_containment(g, report, contain_slack);
  detail::check_geometric_consistency(g, report, sibling_tol);
  detail::check_passage_adjacency(g, report);
  return report;
}

}  // namespace agnav

#endif  // AGNAV_VALIDATION_HPP
