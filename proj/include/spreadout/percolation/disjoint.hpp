#pragma once

#include <utility>
#include <vector>

#include "spreadout/percolation/finite_graph.hpp"

namespace spreadout {

/// Connectivity event {x <-> y}.
struct ConnEvent {
    Point x, y;
};

namespace detail {

inline bool connected_in(const FiniteGraph& g, const std::vector<bool>& usable, int a, int b) {
    if (a == b) return true;
    Dsu dsu(g.size());
    for (size_t i = 0; i < g.edges.size(); ++i)
        if (usable[i]) dsu.unite(g.edges[i].a, g.edges[i].b);
    return dsu.find(a) == dsu.find(b);
}

/// DFS over simple open paths from cur to target; on each complete path,
/// calls rest() with the path edges masked out. Stops early once rest()
/// succeeds.
inline bool for_some_path(const FiniteGraph& g, std::vector<bool>& open, int cur, int target,
                          std::vector<bool>& on_path, auto&& rest) {
    if (cur == target) return rest(open);
    on_path[cur] = true;
    for (size_t i = 0; i < g.edges.size(); ++i) {
        if (!open[i]) continue;
        const auto& e = g.edges[i];
        int nxt = (e.a == cur) ? e.b : (e.b == cur ? e.a : -1);
        if (nxt < 0 || on_path[nxt]) continue;
        open[i] = false;
        bool ok = for_some_path(g, open, nxt, target, on_path, rest);
        open[i] = true;
        if (ok) {
            on_path[cur] = false;
            return true;
        }
    }
    on_path[cur] = false;
    return false;
}

/// Two units of flow between a single source/sink pair on the open subgraph
/// (Menger: edge-disjoint paths). Unit capacities both directions.
inline bool two_edge_disjoint_paths(const FiniteGraph& g, const std::vector<bool>& open, int s, int t) {
    if (s == t) return true;
    // residual capacities per direction
    std::vector<int> cap_ab(g.edges.size()), cap_ba(g.edges.size());
    for (size_t i = 0; i < g.edges.size(); ++i) cap_ab[i] = cap_ba[i] = open[i] ? 1 : 0;
    int flow = 0;
    for (int it = 0; it < 2; ++it) {
        // BFS augmenting path
        std::vector<int> prev_edge(g.size(), -1), prev_node(g.size(), -1);
        std::vector<bool> seen(g.size(), false);
        std::vector<int> queue{s};
        seen[s] = true;
        for (size_t qi = 0; qi < queue.size() && !seen[t]; ++qi) {
            int u = queue[qi];
            for (size_t i = 0; i < g.edges.size(); ++i) {
                const auto& e = g.edges[i];
                int v = -1;
                if (e.a == u && cap_ab[i] > 0) v = e.b;
                else if (e.b == u && cap_ba[i] > 0) v = e.a;
                if (v < 0 || seen[v]) continue;
                seen[v] = true;
                prev_edge[v] = static_cast<int>(i);
                prev_node[v] = u;
                queue.push_back(v);
            }
        }
        if (!seen[t]) break;
        for (int v = t; v != s; v = prev_node[v]) {
            int i = prev_edge[v];
            if (g.edges[i].a == prev_node[v]) {
                --cap_ab[i];
                ++cap_ba[i];
            } else {
                --cap_ba[i];
                ++cap_ab[i];
            }
        }
        ++flow;
    }
    return flow >= 2;
}

}  // namespace detail

/// True iff {x1<->y1} and {x2<->y2} occur disjointly in the configuration:
/// edge-disjoint open witness paths exist. Coinciding pairs reduce to
/// two edge-disjoint paths (Menger, via 2-unit max-flow); distinct pairs
/// are decided exactly by enumerating simple open paths for one event and
/// checking residual connectivity for the other.
inline bool disjoint_occurrence_pair(const FiniteGraph& g, EdgeConfig cfg, const ConnEvent& A,
                                     const ConnEvent& B) {
    int x1 = g.index_of(A.x), y1 = g.index_of(A.y);
    int x2 = g.index_of(B.x), y2 = g.index_of(B.y);
    std::vector<bool> open(g.edges.size());
    for (size_t i = 0; i < g.edges.size(); ++i) open[i] = (cfg >> i & 1u);

    if (x1 == y1) return detail::connected_in(g, open, x2, y2);
    if (x2 == y2) return detail::connected_in(g, open, x1, y1);
    bool same_pair = (x1 == x2 && y1 == y2) || (x1 == y2 && y1 == x2);
    if (same_pair) return detail::two_edge_disjoint_paths(g, open, x1, y1);

    std::vector<bool> on_path(g.size(), false);
    return detail::for_some_path(g, open, x1, y1, on_path, [&](const std::vector<bool>& rest) {
        return detail::connected_in(g, rest, x2, y2);
    });
}

/// Disjoint occurrence of up to three connectivity events: recursive witness
/// search (a witness set always contains a simple path).
inline bool disjoint_occurrence_multi(const FiniteGraph& g, EdgeConfig cfg,
                                      const std::vector<ConnEvent>& events) {
    size_t n_open = 0;
    for (size_t i = 0; i < g.edges.size(); ++i) n_open += (cfg >> i & 1u);
    if (n_open > 20) throw CapacityError("disjoint_occurrence_multi: more than 20 open edges");
    if (events.size() > 3) throw UsageError("disjoint_occurrence_multi: at most 3 events");

    std::vector<bool> open(g.edges.size());
    for (size_t i = 0; i < g.edges.size(); ++i) open[i] = (cfg >> i & 1u);

    // recursive: peel events one at a time
    auto solve = [&](auto&& self, std::vector<bool>& avail, size_t k) -> bool {
        if (k == events.size()) return true;
        int a = g.index_of(events[k].x), b = g.index_of(events[k].y);
        if (a == b) return self(self, avail, k + 1);  // empty witness
        std::vector<bool> on_path(g.size(), false);
        return detail::for_some_path(g, avail, a, b, on_path, [&](std::vector<bool>& rest) {
            return self(self, rest, k + 1);
        });
    };
    return solve(solve, open, 0);
}

}  // namespace spreadout
