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
// Passage-centric navigation graph. Vertices are passages (doorways,
// junctions, shaft connections); an edge joins two passages resident in
// the same leaf area and costs what it takes to cross that area, as
// measured by grid search on a per-leaf raster. On top of the base graph
// two caches support hierarchical planning:
//   area_compact  - the base edges grouped by leaf
//   parent_lift   - per inner area, shortest paths between the boundary
//                   passages of each immediate child, restricted to that
//                   child's subtree, stored with their base-edge chains
// Robot and goal positions enter through an injection handle holding
// temporary attach edges; the graph itself is never mutated by a query.

#ifndef AGNAV_PASSAGE_GRAPH_HPP
#define AGNAV_PASSAGE_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"

#include "agnav/area_graph.hpp"
#include "agnav/errors.hpp"
#include "agnav/grid_search.hpp"
#include "agnav/raster.hpp"

namespace agnav {

/// Cost of moving between floors inside an elevator or stair shaft,
/// standing in for ride or climb time that distance cannot capture.
inline constexpr double kVerticalTransitionCost = 15.0;

struct BaseEdge {
  int u = 0, v = 0;        // passage indices
  double weight = 0.0;     // metres, never below the center distance
  std::string leaf;        // area crossed by this edge
  bool vertical = false;   // floor transition inside a shaft
  bool fallback = false;   // grid search failed, straight-line weight
  std::vector<Vec2> trace; // dense path from center of u to center of v
};

struct LiftEdge {
  int u = 0, v = 0;            // boundary passage indices
  double weight = 0.0;
  std::string child;           // subtree this shortcut crosses
  std::vector<int> base_edges; // expansion, ordered from u to v
};

struct ParentLift {
  std::vector<int> vertices;  // boundary passages of all immediate children
  std::vector<LiftEdge> edges;
};

struct VirtualPoint {
  Vec2 pos;
  std::string leaf;
};

struct AttachEdge {
  int slot = 0;     // which virtual point
  int passage = 0;  // resident passage it connects to
  double weight = 0.0;
  bool fallback = false;
  std::vector<Vec2> trace;  // from the virtual point to the passage center
};

class PassageGraph;

/// Query-scoped overlay adding virtual vertices for concrete positions.
struct InjectionHandle {
  const PassageGraph* graph = nullptr;
  std::vector<VirtualPoint> points;
  std::vector<AttachEdge> edges;
  std::vector<std::vector<int>> edges_by_slot;

  int vertex_of(int slot) const;
};

class PassageGraph {
 public:
  struct Config {
    double leaf_res = kLeafRasterRes;
    double c_vert = kVerticalTransitionCost;
    int snap_radius = 3;
  };

  explicit PassageGraph(const AreaGraph& g) : PassageGraph(g, Config()) {}
  PassageGraph(const AreaGraph& g, Config cfg) : map_(&g), cfg_(cfg) {
    build_base();
  }

  const AreaGraph& map() const { return *map_; }
  const Config& config() const { return cfg_; }
  int n_passages() const { return static_cast<int>(map_->passages.size()); }
  const std::vector<BaseEdge>& edges() const { return edges_; }

  /// (edge index, other passage) pairs incident to \p passage.
  const std::vector<std::pair<int, int>>& adj(int passage) const { return adj_[passage]; }

  const std::vector<int>& edges_of_leaf(const std::string& leaf) const {
    static const std::vector<int> kEmpty;
    auto it = edges_by_leaf_.find(leaf);
    return it == edges_by_leaf_.end() ? kEmpty : it->second;
  }

  // -- hierarchical cache ---------------------------------------------------

  bool hier_cache_built() const { return cache_built_; }
  void clear_hier_cache() {
    lifts_.clear();
    cache_built_ = false;
  }

  void build_hier_cache() {
    lifts_.clear();
    for (const Area& a : map_->areas) {
      if (map_->is_leaf(a)) continue;
      ParentLift lift;
      std::set<int> verts;
      for (int child_idx : map_->children(a.name)) {
        const std::string& child = map_->areas[child_idx].name;
        std::vector<int> boundary = boundary_passages(child);
        verts.insert(boundary.begin(), boundary.end());
        append_child_shortcuts(child, boundary, lift.edges);
      }
      lift.vertices.assign(verts.begin(), verts.end());
      lifts_[a.name] = std::move(lift);
    }
    cache_built_ = true;
  }

  const ParentLift* parent_lift(const std::string& area) const {
    auto it = lifts_.find(area);
    return it == lifts_.end() ? nullptr : &it->second;
  }

  /// Base edges whose two endpoints both reside in \p leaf.
  const std::vector<int>& area_compact(const std::string& leaf) const {
    return edges_of_leaf(leaf);
  }

  // -- hierarchy helpers ----------------------------------------------------

  bool in_subtree(const std::string& area, const std::string& root) const {
    if (!map_->find_area(area)) return false;
    for (const std::string& anc : map_->ancestor_chain(area)) {
      if (anc == root) return true;
    }
    return false;
  }

  /// Passages with exactly one endpoint area inside subtree(\p area).
  std::vector<int> boundary_passages(const std::string& area) const {
    std::vector<int> out;
    for (int i = 0; i < n_passages(); ++i) {
      const Passage& p = map_->passages[i];
      const bool from_in = in_subtree(p.from, area);
      const bool to_in = in_subtree(p.to, area);
      if (from_in != to_in) out.push_back(i);
    }
    return out;
  }

  /// Immediate child of \p parent whose subtree contains \p area, or
  /// nullopt when \p area is \p parent itself or lives elsewhere.
  std::optional<std::string> child_containing(const std::string& parent,
                                              const std::string& area) const {
    std::vector<std::string> chain = map_->ancestor_chain(area);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      if (chain[i + 1] == parent) return chain[i];
    }
    return std::nullopt;
  }

  // -- per-leaf geometry ----------------------------------------------------

  const OccGrid& leaf_raster(const std::string& leaf) const {
    auto it = rasters_.find(leaf);
    if (it != rasters_.end()) return it->second;
    return rasters_.emplace(leaf, rasterize_leaf(*map_, leaf, cfg_.leaf_res))
        .first->second;
  }

  struct IntraPath {
    double cost = 0.0;
    bool fallback = false;    // straight line, grid search unusable
    std::vector<Vec2> trace;  // from a to b, exact endpoints
  };

  /// Path between two points inside one leaf: grid search between the
  /// nearest free cells, falling back to the straight line when either
  /// snap or the search fails. Trace endpoints are the exact inputs.
  IntraPath intra_area_path(const std::string& leaf, const Vec2& a, const Vec2& b) const {
    IntraPath out;
    const OccGrid& grid = leaf_raster(leaf);
    auto ca = nearest_free_cell(grid, a, cfg_.snap_radius);
    auto cb = nearest_free_cell(grid, b, cfg_.snap_radius);
    if (ca && cb) {
      GridPath path = grid_astar(grid, *ca, *cb);
      if (path.found) {
        out.cost = std::max(path.cost, (b - a).norm());
        out.trace = cells_to_world(grid, path.cells);
        if (out.trace.size() < 2) out.trace = {a, b};
        out.trace.front() = a;
        out.trace.back() = b;
        return out;
      }
    }
    out.fallback = true;
    out.cost = (b - a).norm();
    out.trace = {a, b};
    return out;
  }

  // -- virtual points -------------------------------------------------------

  /// Builds attach edges from each point to every passage of its leaf.
  /// Points may share a leaf; the graph is left untouched.
  InjectionHandle inject(const std::vector<VirtualPoint>& points) const {
    InjectionHandle h;
    h.graph = this;
    h.points = points;
    h.edges_by_slot.resize(points.size());
    for (int slot = 0; slot < static_cast<int>(points.size()); ++slot) {
      const VirtualPoint& vp = points[slot];
      if (!map_->find_area(vp.leaf)) throw UnknownAreaError(vp.leaf);
      for (int pi : map_->passages_in(vp.leaf)) {
        const Passage& p = map_->passages[pi];
        IntraPath ip = intra_area_path(vp.leaf, vp.pos, p.center);
        AttachEdge e;
        e.slot = slot;
        e.passage = pi;
        e.weight = ip.cost;
        e.fallback = ip.fallback;
        e.trace = std::move(ip.trace);
        h.edges_by_slot[slot].push_back(static_cast<int>(h.edges.size()));
        h.edges.push_back(std::move(e));
      }
    }
    return h;
  }

  // -- cache persistence ----------------------------------------------------

  void save_cache(const std::string& path) const {
    nlohmann::json j;
    j["schema"] = "agnav-graph-cache-v1";
    j["map_hash"] = content_hash(*map_);
    j["config"] = {{"leaf_res", cfg_.leaf_res},
                   {"c_vert", cfg_.c_vert},
                   {"snap_radius", cfg_.snap_radius}};
    nlohmann::json je = nlohmann::json::array();
    for (const BaseEdge& e : edges_) {
      nlohmann::json t = nlohmann::json::array();
      for (const Vec2& p : e.trace) t.push_back({p.x, p.y});
      je.push_back({{"u", e.u},
                    {"v", e.v},
                    {"w", e.weight},
                    {"leaf", e.leaf},
                    {"vertical", e.vertical},
                    {"fallback", e.fallback},
                    {"trace", std::move(t)}});
    }
    j["edges"] = std::move(je);
    if (cache_built_) {
      nlohmann::json jl;
      for (const auto& [parent, lift] : lifts_) {
        nlohmann::json le = nlohmann::json::array();
        for (const LiftEdge& e : lift.edges) {
          le.push_back({{"u", e.u},
                        {"v", e.v},
                        {"w", e.weight},
                        {"child", e.child},
                        {"base", e.base_edges}});
        }
        jl[parent] = {{"vertices", lift.vertices}, {"edges", std::move(le)}};
      }
      j["parent_lift"] = std::move(jl);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write cache file: " + path);
    out << j.dump();
  }

  static PassageGraph from_cache(const AreaGraph& g, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open cache file: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw CacheFileError(std::string("unreadable json: ") + e.what());
    }
    if (j.value("schema", "") != std::string("agnav-graph-cache-v1")) {
      throw CacheFileError("unknown schema");
    }
    if (j.value("map_hash", std::uint64_t{0}) != content_hash(g)) {
      throw CacheFileError("cache was built from a different map");
    }
    Config cfg;
    cfg.leaf_res = j["config"].value("leaf_res", kLeafRasterRes);
    cfg.c_vert = j["config"].value("c_vert", kVerticalTransitionCost);
    cfg.snap_radius = j["config"].value("snap_radius", 3);

    PassageGraph pg(g, cfg, FromCacheTag{});
    for (const nlohmann::json& e : j["edges"]) {
      BaseEdge be;
      be.u = e["u"].get<int>();
      be.v = e["v"].get<int>();
      be.weight = e["w"].get<double>();
      be.leaf = e["leaf"].get<std::string>();
      be.vertical = e["vertical"].get<bool>();
      be.fallback = e["fallback"].get<bool>();
      for (const nlohmann::json& p : e["trace"]) {
        be.trace.push_back({p[0].get<double>(), p[1].get<double>()});
      }
      if (be.u < 0 || be.u >= pg.n_passages() || be.v < 0 || be.v >= pg.n_passages()) {
        throw CacheFileError("edge endpoint out of range");
      }
      pg.push_edge(std::move(be));
    }
    if (j.contains("parent_lift")) {
      for (auto it = j["parent_lift"].begin(); it != j["parent_lift"].end(); ++it) {
        ParentLift lift;
        lift.vertices = it.value()["vertices"].get<std::vector<int>>();
        for (const nlohmann::json& e : it.value()["edges"]) {
          LiftEdge le;
          le.u = e["u"].get<int>();
          le.v = e["v"].get<int>();
          le.weight = e["w"].get<double>();
          le.child = e["child"].get<std::string>();
          le.base_edges = e["base"].get<std::vector<int>>();
          lift.edges.push_back(std::move(le));
        }
        pg.lifts_[it.key()] = std::move(lift);
      }
      pg.cache_built_ = true;
    }
    return pg;
  }

 private:
  struct FromCacheTag {};
  PassageGraph(const AreaGraph& g, Config cfg, FromCacheTag) : map_(&g), cfg_(cfg) {
    adj_.resize(map_->passages.size());
  }

  void push_edge(BaseEdge e) {
    const int idx = static_cast<int>(edges_.size());
    adj_[e.u].emplace_back(idx, e.v);
    adj_[e.v].emplace_back(idx, e.u);
    edges_by_leaf_[e.leaf].push_back(idx);
    edges_.push_back(std::move(e));
  }

  /// Connects every pair of passages resident in each leaf. Pairs that
  /// join the same two areas are skipped: a detour door to door between
  /// rooms already connected through both doors never shortens a route.
  void build_base() {
    adj_.resize(map_->passages.size());
    for (const Area& a : map_->areas) {
      if (!map_->is_leaf(a) || a.is_structure()) continue;
      const std::vector<int>& resident = map_->passages_in(a.name);
      for (std::size_t i = 0; i < resident.size(); ++i) {
        for (std::size_t k = i + 1; k < resident.size(); ++k) {
          const Passage& p = map_->passages[resident[i]];
          const Passage& q = map_->passages[resident[k]];
          if (same_interface(p, q)) continue;
          BaseEdge e;
          e.u = resident[i];
          e.v = resident[k];
          e.leaf = a.name;
          if (a.is_vertical() && p.level != q.level) {
            e.vertical = true;
            e.weight = cfg_.c_vert;
            e.trace = {p.center, q.center};
          } else {
            IntraPath ip = intra_area_path(a.name, p.center, q.center);
            e.weight = ip.cost;
            e.fallback = ip.fallback;
            e.trace = std::move(ip.trace);
          }
          push_edge(std::move(e));
        }
      }
    }
  }

  static bool same_interface(const Passage& p, const Passage& q) {
    return (p.from == q.from && p.to == q.to) || (p.from == q.to && p.to == q.from);
  }

  /// Shortest paths between the boundary passages of \p child using only
  /// edges inside its subtree, appended as lift edges with their
  /// base-edge chains.
  void append_child_shortcuts(const std::string& child, const std::vector<int>& boundary,
                              std::vector<LiftEdge>& out) const {
    if (boundary.size() < 2) return;
    std::unordered_set<std::string> leaves;
    collect_leaves(child, leaves);
    std::unordered_set<int> targets(boundary.begin(), boundary.end());

    for (std::size_t bi = 0; bi < boundary.size(); ++bi) {
      const int source = boundary[bi];
      std::unordered_map<int, double> dist;
      std::unordered_map<int, std::pair<int, int>> from;  // vertex -> (prev, edge)
      using QE = std::pair<double, int>;
      std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
      dist[source] = 0.0;
      pq.push({0.0, source});
      while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        auto du = dist.find(u);
        if (du == dist.end() || d > du->second) continue;
        for (const auto& [ei, v] : adj_[u]) {
          if (!leaves.count(edges_[ei].leaf)) continue;
          const double nd = d + edges_[ei].weight;
          auto dv = dist.find(v);
          if (dv == dist.end() || nd < dv->second) {
            dist[v] = nd;
            from[v] = {u, ei};
            pq.push({nd, v});
          }
        }
      }
      for (std::size_t bk = bi + 1; bk < boundary.size(); ++bk) {
        const int target = boundary[bk];
        auto dt = dist.find(target);
        if (dt == dist.end()) continue;
        LiftEdge le;
        le.u = source;
        le.v = target;
        le.weight = dt->second;
        le.child = child;
        for (int v = target; v != source;) {
          const auto& [prev, ei] = from.at(v);
          le.base_edges.push_back(ei);
          v = prev;
        }
        std::reverse(le.base_edges.begin(), le.base_edges.end());
        out.push_back(std::move(le));
      }
    }
  }

  void collect_leaves(const std::string& root, std::unordered_set<std::string>& out) const {
    const Area& a = map_->area(root);
    const std::vector<int>& kids = map_->children(a.name);
    if (kids.empty()) {
      out.insert(a.name);
      return;
    }
    for (int k : kids) collect_leaves(map_->areas[k].name, out);
  }

  const AreaGraph* map_;
  Config cfg_;
  std::vector<BaseEdge> edges_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
  std::unordered_map<std::string, std::vector<int>> edges_by_leaf_;
  std::unordered_map<std::string, ParentLift> lifts_;
  bool cache_built_ = false;
  mutable std::unordered_map<std::string, OccGrid> rasters_;
};

inline int InjectionHandle::vertex_of(int slot) const {
  return graph->n_passages() + slot;
}

}  // namespace agnav

#endif  // AGNAV_PASSAGE_GRAPH_HPP
