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
// Route planning over the passage graph. Two strategies with identical
// cost semantics:
//   plan_flat          - one search across the whole base graph
//   plan_hierarchical  - confines the search to the subtree under the
//                        lowest common ancestor of the two endpoint
//                        areas: endpoint costs are lifted level by level
//                        through the cached per-parent shortcut graphs,
//                        then a single small search runs at the top.
// Both return the same optimal cost because lifted edges are exact
// shortest paths over the same base edges. The hierarchical planner
// falls back to the flat one whenever a stage cannot proceed.

#ifndef AGNAV_HIER_PLANNER_HPP
#define AGNAV_HIER_PLANNER_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "agnav/area_graph.hpp"
#include "agnav/errors.hpp"
#include "agnav/geometry.hpp"
#include "agnav/passage_graph.hpp"

namespace agnav {

struct StageTimings {
  std::int64_t inject_us = 0;
  std::int64_t lift_us = 0;
  std::int64_t assemble_us = 0;
  std::int64_t search_us = 0;
  std::int64_t expand_us = 0;
  std::int64_t total_us = 0;
};

struct PlanQuery {
  Vec2 start;
  Vec2 goal;
  std::string start_level;
  std::string goal_level;
  std::string start_leaf;  // located from position and level when empty
  std::string goal_leaf;
};

struct PlanResult {
  bool success = false;
  std::string failure;
  std::vector<std::string> passages;  // passage names in travel order
  std::vector<Vec2> dense_path;       // start position to goal position
  double cost = 0.0;
  int closed_states = 0;       // expansions of the route search itself
  int lift_closed_states = 0;  // expansions spent lifting the frontiers
  bool used_fallback = false;
  std::string fallback_reason;
  bool same_floor = false;
  std::string lca;  // empty for flat plans and fallbacks
  std::vector<std::string> floor_transitions;  // shaft areas crossed vertically
  StageTimings timings;
};

class Planner {
 public:
  /// Builds the hierarchical cache if the graph does not have one yet.
  explicit Planner(PassageGraph& pg) : pg_(&pg) {
    if (!pg.hier_cache_built()) pg.build_hier_cache();
    depth_cap_ = pg.map().max_depth() + 2;
  }

  PlanResult plan_flat(const PlanQuery& q) const {
    const auto t0 = clock_now();
    PlanResult out;
    out.same_floor = query_same_floor(q);
    std::string leaf_s, leaf_g;
    if (!resolve_leaves(q, leaf_s, leaf_g, out)) return out;

    const auto t1 = clock_now();
    InjectionHandle h = pg_->inject({{q.start, leaf_s}, {q.goal, leaf_g}});
    std::optional<PassageGraph::IntraPath> direct;
    if (leaf_s == leaf_g) direct = pg_->intra_area_path(leaf_s, q.start, q.goal);
    out.timings.inject_us = us_since(t1);

    const auto t2 = clock_now();
    SearchOutcome res = overlay_search(h, direct, q, "");
    out.timings.search_us = us_since(t2);
    out.closed_states = res.closed;
    if (!res.found) {
      out.failure = "no route between start and goal";
      out.timings.total_us = us_since(t0);
      return out;
    }

    const auto t3 = clock_now();
    render_route(h, direct, res.steps, out);
    out.cost = res.cost;
    out.timings.expand_us = us_since(t3);
    out.timings.total_us = us_since(t0);
    return out;
  }

  PlanResult plan_hierarchical(const PlanQuery& q) const {
    const auto t0 = clock_now();
    PlanResult out;
    out.same_floor = query_same_floor(q);
    std::string leaf_s, leaf_g;
    if (!resolve_leaves(q, leaf_s, leaf_g, out)) return out;

    const auto t1 = clock_now();
    InjectionHandle h = pg_->inject({{q.start, leaf_s}, {q.goal, leaf_g}});
    out.timings.inject_us = us_since(t1);

    // Both endpoints in one leaf: search its compact edges plus the
    // attach edges and the direct connection, nothing above is needed.
    if (leaf_s == leaf_g) {
      std::optional<PassageGraph::IntraPath> direct =
          pg_->intra_area_path(leaf_s, q.start, q.goal);
      const auto t2 = clock_now();
      SearchOutcome res = overlay_search(h, direct, q, leaf_s);
      out.timings.search_us = us_since(t2);
      out.closed_states = res.closed;
      if (!res.found) {
        out.failure = "no route within area " + leaf_s;
        out.timings.total_us = us_since(t0);
        return out;
      }
      const auto t3 = clock_now();
      render_route(h, direct, res.steps, out);
      out.cost = res.cost;
      out.lca = leaf_s;
      out.timings.expand_us = us_since(t3);
      out.timings.total_us = us_since(t0);
      return out;
    }

    std::optional<std::string> lca = pg_->map().lca(leaf_s, leaf_g);
    if (!lca) return fallback(q, out, t0, "endpoints live in different trees");
    if (*lca == leaf_s || *lca == leaf_g) {
      return fallback(q, out, t0, "degenerate ancestor relation");
    }

    const auto t4 = clock_now();
    int lift_closed = 0;
    std::optional<Frontier> fs = lift_to_lca(h, 0, leaf_s, *lca, lift_closed);
    std::optional<Frontier> fg = lift_to_lca(h, 1, leaf_g, *lca, lift_closed);
    out.timings.lift_us = us_since(t4);
    out.lift_closed_states = lift_closed;
    if (!fs || fs->empty()) return fallback(q, out, t0, "start frontier is empty");
    if (!fg || fg->empty()) return fallback(q, out, t0, "goal frontier is empty");

    const auto t5 = clock_now();
    const ParentLift* top = pg_->parent_lift(*lca);
    if (!top) return fallback(q, out, t0, "no cached shortcuts at " + *lca);
    Assembled graph = assemble(*top, *fs, *fg);
    out.timings.assemble_us = us_since(t5);

    const auto t6 = clock_now();
    int closed = 0;
    TopOutcome res = top_search(graph, q, closed);
    out.timings.search_us = us_since(t6);
    out.closed_states = closed;
    if (!res.found) return fallback(q, out, t0, "no route through " + *lca);

    const auto t7 = clock_now();
    std::vector<Step> steps = flatten_top_path(*top, *fs, *fg, res);
    render_route(h, std::nullopt, steps, out);
    out.cost = res.cost;
    out.lca = *lca;
    out.timings.expand_us = us_since(t7);
    out.timings.total_us = us_since(t0);
    return out;
  }

 private:
  using Clock = std::chrono::steady_clock;
  static Clock::time_point clock_now() { return Clock::now(); }
  static std::int64_t us_since(Clock::time_point t) {
    return std::chrono::duration_cast<std::chrono::microseconds>(clock_now() - t).count();
  }

  // A compact route element. Lift steps expand into base edges later;
  // base edge orientation is recovered by chaining passage endpoints.
  struct Step {
    enum Kind { kAttach, kBase, kLift, kDirect } kind = kBase;
    int index = -1;                      // attach, base or lift edge index
    bool rev = false;                    // lift edges only
    const ParentLift* owner = nullptr;   // lift edges only
  };

  struct FrontierEntry {
    double cost = 0.0;
    std::vector<Step> steps;  // from the virtual point to this passage
  };
  using Frontier = std::unordered_map<int, FrontierEntry>;

  bool query_same_floor(const PlanQuery& q) const {
    return agnav::same_floor(q.start_level, q.goal_level);
  }

  bool resolve_leaves(const PlanQuery& q, std::string& leaf_s, std::string& leaf_g,
                      PlanResult& out) const {
    const AreaGraph& m = pg_->map();
    try {
      leaf_s = q.start_leaf.empty() ? m.locate_leaf_area(q.start, q.start_level)
                                    : q.start_leaf;
      leaf_g = q.goal_leaf.empty() ? m.locate_leaf_area(q.goal, q.goal_level)
                                   : q.goal_leaf;
    } catch (const Error& e) {
      out.failure = e.what();
      return false;
    }
    if (!m.find_area(leaf_s)) {
      out.failure = "unknown start area: " + leaf_s;
      return false;
    }
    if (!m.find_area(leaf_g)) {
      out.failure = "unknown goal area: " + leaf_g;
      return false;
    }
    return true;
  }

  PlanResult fallback(const PlanQuery& q, const PlanResult& sofar, Clock::time_point t0,
                      std::string reason) const {
    PlanResult out = plan_flat(q);
    out.used_fallback = true;
    out.fallback_reason = std::move(reason);
    out.lift_closed_states = sofar.lift_closed_states;
    out.timings.inject_us += sofar.timings.inject_us;
    out.timings.lift_us = sofar.timings.lift_us;
    out.timings.total_us = us_since(t0);
    return out;
  }

  // -- searches -------------------------------------------------------------

  struct QueueEntry {
    double f, g;
    int v;
    bool operator>(const QueueEntry& o) const {
      if (f != o.f) return f > o.f;
      if (g != o.g) return g < o.g;  // prefer deeper progress on ties
      return v > o.v;
    }
  };
  using MinQueue = std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;

  struct SearchOutcome {
    bool found = false;
    double cost = 0.0;
    int closed = 0;
    std::vector<Step> steps;
  };

  Vec2 vertex_pos(int v, const PlanQuery& q) const {
    const int n = pg_->n_passages();
    if (v == n) return q.start;
    if (v == n + 1) return q.goal;
    return pg_->map().passages[v].center;
  }

  /// Search over base edges plus attach edges, with the start and goal as
  /// two extra vertices. When \p restrict_leaf is set only the edges of
  /// that leaf participate. The heuristic is the straight-line distance
  /// to the goal, admissible because every edge weight is at least the
  /// distance between its endpoint positions.
  SearchOutcome overlay_search(const InjectionHandle& h,
                               const std::optional<PassageGraph::IntraPath>& direct,
                               const PlanQuery& q, const std::string& restrict_leaf) const {
    SearchOutcome out;
    const int n = pg_->n_passages();
    const int vs = n, vg = n + 1;

    std::unordered_map<int, std::vector<std::pair<int, int>>> attach_at;  // passage -> (slot, edge)
    for (int ei = 0; ei < static_cast<int>(h.edges.size()); ++ei) {
      attach_at[h.edges[ei].passage].emplace_back(h.edges[ei].slot, ei);
    }

    struct Ref {
      Step step;
      int prev = -1;
    };
    std::unordered_map<int, double> g;
    std::unordered_map<int, Ref> from;
    std::unordered_set<int> closed;
    MinQueue open;

    auto heur = [&](int v) { return (vertex_pos(v, q) - q.goal).norm(); };
    g[vs] = 0.0;
    open.push({heur(vs), 0.0, vs});

    auto relax = [&](int to, double ng, const Step& step, int prev) {
      auto it = g.find(to);
      if (it != g.end() && it->second <= ng) return;
      g[to] = ng;
      from[to] = {step, prev};
      open.push({ng + heur(to), ng, to});
    };

    while (!open.empty()) {
      const QueueEntry cur = open.top();
      open.pop();
      if (closed.count(cur.v)) continue;
      closed.insert(cur.v);
      ++out.closed;
      if (cur.v == vg) break;
      const double gc = cur.g;

      if (cur.v == vs || cur.v == vg) {
        const int slot = cur.v - n;
        for (int ei : h.edges_by_slot[slot]) {
          const AttachEdge& e = h.edges[ei];
          relax(e.passage, gc + e.weight, Step{Step::kAttach, ei, false, nullptr}, cur.v);
        }
        if (direct) {
          relax(cur.v == vs ? vg : vs, gc + direct->cost,
                Step{Step::kDirect, 0, false, nullptr}, cur.v);
        }
      } else {
        for (const auto& [ei, other] : pg_->adj(cur.v)) {
          const BaseEdge& e = pg_->edges()[ei];
          if (!restrict_leaf.empty() && e.leaf != restrict_leaf) continue;
          relax(other, gc + e.weight, Step{Step::kBase, ei, false, nullptr}, cur.v);
        }
        auto it = attach_at.find(cur.v);
        if (it != attach_at.end()) {
          for (const auto& [slot, ei] : it->second) {
            relax(n + slot, gc + h.edges[ei].weight,
                  Step{Step::kAttach, ei, false, nullptr}, cur.v);
          }
        }
      }
    }

    auto git = g.find(vg);
    if (git == g.end() || !closed.count(vg)) return out;
    out.found = true;
    out.cost = git->second;
    for (int v = vg; v != vs;) {
      const Ref& r = from.at(v);
      out.steps.push_back(r.step);
      v = r.prev;
    }
    std::reverse(out.steps.begin(), out.steps.end());
    return out;
  }

  /// Moves the cost frontier of one endpoint upward until its area's
  /// parent is the common ancestor. Each step is a small multi-source
  /// shortest path run over the cached shortcut graph of the next parent,
  /// keeping only that parent's boundary passages.
  std::optional<Frontier> lift_to_lca(const InjectionHandle& h, int slot,
                                      const std::string& leaf, const std::string& lca,
                                      int& closed) const {
    Frontier f;
    for (int ei : h.edges_by_slot[slot]) {
      const AttachEdge& e = h.edges[ei];
      auto it = f.find(e.passage);
      if (it == f.end() || e.weight < it->second.cost) {
        f[e.passage] = {e.weight, {Step{Step::kAttach, ei, false, nullptr}}};
      }
    }
    std::string area = leaf;
    for (int guard = 0; guard <= depth_cap_; ++guard) {
      const Area* a = pg_->map().find_area(area);
      if (!a || a->parent.empty()) return std::nullopt;
      if (a->parent == lca) return f;
      const ParentLift* lift = pg_->parent_lift(a->parent);
      if (!lift) return std::nullopt;
      f = lift_step(*lift, f, pg_->boundary_passages(a->parent), closed);
      if (f.empty()) return std::nullopt;
      area = a->parent;
    }
    return std::nullopt;  // guard tripped, malformed hierarchy
  }

  Frontier lift_step(const ParentLift& lift, const Frontier& in,
                     const std::vector<int>& keep, int& closed) const {
    std::unordered_map<int, std::vector<std::pair<int, int>>> adj;  // v -> (edge, other)
    for (int i = 0; i < static_cast<int>(lift.edges.size()); ++i) {
      adj[lift.edges[i].u].emplace_back(i, lift.edges[i].v);
      adj[lift.edges[i].v].emplace_back(i, lift.edges[i].u);
    }
    std::unordered_map<int, FrontierEntry> best;
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
    for (const auto& [v, fe] : in) {
      auto it = best.find(v);
      if (it == best.end() || fe.cost < it->second.cost) {
        best[v] = fe;
        pq.push({fe.cost, v});
      }
    }
    std::unordered_set<int> done;
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (done.count(u)) continue;
      if (d > best.at(u).cost) continue;
      done.insert(u);
      ++closed;
      auto au = adj.find(u);
      if (au == adj.end()) continue;
      for (const auto& [ei, v] : au->second) {
        const LiftEdge& e = lift.edges[ei];
        const double nd = d + e.weight;
        auto it = best.find(v);
        if (it != best.end() && it->second.cost <= nd) continue;
        FrontierEntry fe = best.at(u);
        fe.cost = nd;
        fe.steps.push_back(Step{Step::kLift, ei, e.v == u, &lift});
        best[v] = std::move(fe);
        pq.push({nd, v});
      }
    }
    Frontier out;
    for (int v : keep) {
      auto it = best.find(v);
      if (it != best.end()) out[v] = it->second;
    }
    return out;
  }

  // -- top-level assembly and search ---------------------------------------

  struct Assembled {
    const ParentLift* top = nullptr;
    const Frontier* fs = nullptr;
    const Frontier* fg = nullptr;
    std::unordered_map<int, std::vector<std::pair<int, int>>> adj;  // lift adjacency
  };

  Assembled assemble(const ParentLift& top, const Frontier& fs, const Frontier& fg) const {
    Assembled a;
    a.top = &top;
    a.fs = &fs;
    a.fg = &fg;
    for (int i = 0; i < static_cast<int>(top.edges.size()); ++i) {
      a.adj[top.edges[i].u].emplace_back(i, top.edges[i].v);
      a.adj[top.edges[i].v].emplace_back(i, top.edges[i].u);
    }
    return a;
  }

  struct TopOutcome {
    bool found = false;
    double cost = 0.0;
    int entry_passage = -1;           // where the start frontier connects
    int exit_passage = -1;            // where the goal frontier connects
    std::vector<std::pair<int, bool>> lift_path;  // (edge, reversed) in order
  };

  TopOutcome top_search(const Assembled& a, const PlanQuery& q, int& closed) const {
    TopOutcome out;
    const int n = pg_->n_passages();
    const int vs = n, vg = n + 1;

    struct Ref {
      int kind = 0;  // 0 frontier_s, 1 lift, 2 frontier_g
      int index = 0;
      bool rev = false;
      int prev = -1;
    };
    std::unordered_map<int, double> g;
    std::unordered_map<int, Ref> from;
    std::unordered_set<int> done;
    MinQueue open;
    auto heur = [&](int v) { return (vertex_pos(v, q) - q.goal).norm(); };

    g[vs] = 0.0;
    open.push({heur(vs), 0.0, vs});
    auto relax = [&](int to, double ng, Ref r) {
      auto it = g.find(to);
      if (it != g.end() && it->second <= ng) return;
      g[to] = ng;
      from[to] = r;
      open.push({ng + heur(to), ng, to});
    };

    while (!open.empty()) {
      const QueueEntry cur = open.top();
      open.pop();
      if (done.count(cur.v)) continue;
      done.insert(cur.v);
      ++closed;
      if (cur.v == vg) break;

      if (cur.v == vs) {
        for (const auto& [p, fe] : *a.fs) {
          relax(p, fe.cost, Ref{0, p, false, vs});
        }
        continue;
      }
      auto git = a.fg->find(cur.v);
      if (git != a.fg->end()) {
        relax(vg, cur.g + git->second.cost, Ref{2, cur.v, false, cur.v});
      }
      auto ait = a.adj.find(cur.v);
      if (ait != a.adj.end()) {
        for (const auto& [ei, other] : ait->second) {
          const LiftEdge& e = a.top->edges[ei];
          relax(other, cur.g + e.weight, Ref{1, ei, e.v == cur.v, cur.v});
        }
      }
    }

    auto git = g.find(vg);
    if (git == g.end() || !done.count(vg)) return out;
    out.found = true;
    out.cost = git->second;
    for (int v = vg; v != vs;) {
      const Ref& r = from.at(v);
      if (r.kind == 2) {
        out.exit_passage = r.index;
      } else if (r.kind == 1) {
        out.lift_path.emplace_back(r.index, r.rev);
      } else {
        out.entry_passage = r.index;
      }
      v = r.prev;
    }
    std::reverse(out.lift_path.begin(), out.lift_path.end());
    return out;
  }

  std::vector<Step> flatten_top_path(const ParentLift& top, const Frontier& fs,
                                     const Frontier& fg, const TopOutcome& res) const {
    std::vector<Step> steps = fs.at(res.entry_passage).steps;
    for (const auto& [ei, rev] : res.lift_path) {
      steps.push_back(Step{Step::kLift, ei, rev, &top});
    }
    // Goal-side frontier steps were recorded from the goal outward, so
    // they are replayed in reverse with flipped orientation.
    const std::vector<Step>& back = fg.at(res.exit_passage).steps;
    for (auto it = back.rbegin(); it != back.rend(); ++it) {
      Step s = *it;
      s.rev = !s.rev;
      steps.push_back(s);
    }
    return steps;
  }

  // -- route rendering ------------------------------------------------------

  static void append_trace(std::vector<Vec2>& dense, const std::vector<Vec2>& trace,
                           bool reversed) {
    if (trace.empty()) return;
    if (!reversed) {
      dense.insert(dense.end(), trace.begin() + (dense.empty() ? 0 : 1), trace.end());
    } else {
      auto begin = trace.rbegin() + (dense.empty() ? 0 : 1);
      dense.insert(dense.end(), begin, trace.rend());
    }
  }

  /// Turns a step sequence into passage names, a dense path and the
  /// vertical transition list. Lift steps are expanded to base edges;
  /// base edge orientation follows from the passage chain.
  void render_route(const InjectionHandle& h,
                    const std::optional<PassageGraph::IntraPath>& direct,
                    const std::vector<Step>& steps, PlanResult& out) const {
    out.success = true;
    if (steps.size() == 1 && steps[0].kind == Step::kDirect) {
      out.dense_path = direct->trace;
      return;
    }
    int attach_start = -1, attach_goal = -1;
    std::vector<int> base_seq;
    for (const Step& s : steps) {
      switch (s.kind) {
        case Step::kAttach:
          (attach_start < 0 ? attach_start : attach_goal) = s.index;
          break;
        case Step::kBase:
          base_seq.push_back(s.index);
          break;
        case Step::kLift: {
          const LiftEdge& le = s.owner->edges[s.index];
          if (!s.rev) {
            base_seq.insert(base_seq.end(), le.base_edges.begin(), le.base_edges.end());
          } else {
            base_seq.insert(base_seq.end(), le.base_edges.rbegin(), le.base_edges.rend());
          }
          break;
        }
        case Step::kDirect:
          break;  // only valid as a lone step, handled above
      }
    }
    if (attach_start < 0 || attach_goal < 0) {
      out.success = false;
      out.failure = "route stitching failed";
      return;
    }

    const AttachEdge& as = h.edges[attach_start];
    append_trace(out.dense_path, as.trace, false);
    int cur = as.passage;
    out.passages.push_back(pg_->map().passages[cur].name);
    for (int ei : base_seq) {
      const BaseEdge& e = pg_->edges()[ei];
      const bool fwd = (e.u == cur);
      if (!fwd && e.v != cur) {
        out.success = false;
        out.failure = "route stitching failed";
        return;
      }
      append_trace(out.dense_path, e.trace, !fwd);
      cur = fwd ? e.v : e.u;
      out.passages.push_back(pg_->map().passages[cur].name);
      if (e.vertical) out.floor_transitions.push_back(e.leaf);
    }
    const AttachEdge& ag = h.edges[attach_goal];
    append_trace(out.dense_path, ag.trace, true);
  }

  PassageGraph* pg_;
  int depth_cap_ = 8;
};

}  // namespace agnav

#endif  // AGNAV_HIER_PLANNER_HPP
