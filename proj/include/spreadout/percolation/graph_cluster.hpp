#pragma once

#include <vector>

#include "spreadout/core/rng.hpp"
#include "spreadout/percolation/finite_graph.hpp"

namespace spreadout {

/// Open cluster of `origin` on a FiniteGraph substrate, restricted to region.
/// Each edge outcome is sampled lazily and memoized, so it is decided at most
/// once per exploration. Returns per-site membership flags.
inline std::vector<bool> explore_cluster_graph(const FiniteGraph& g, const Region& region,
                                               const Point& origin, CounterRng& rng) {
    int o = g.index_of(origin);
    std::vector<int8_t> edge_state(g.edges.size(), -1);  // -1 undecided, 0 closed, 1 open
    std::vector<bool> in_cluster(g.size(), false);
    std::vector<int> frontier{o};
    in_cluster[o] = true;

    // adjacency once per call; graphs here are tiny
    std::vector<std::vector<int>> inc(g.size());
    for (size_t i = 0; i < g.edges.size(); ++i) {
        inc[g.edges[i].a].push_back(static_cast<int>(i));
        inc[g.edges[i].b].push_back(static_cast<int>(i));
    }

    while (!frontier.empty()) {
        int u = frontier.back();
        frontier.pop_back();
        for (int ei : inc[u]) {
            const auto& e = g.edges[ei];
            int v = (e.a == u) ? e.b : e.a;
            if (!contains(region, g.sites[e.a]) || !contains(region, g.sites[e.b])) continue;
            if (edge_state[ei] == -1) edge_state[ei] = rng.bernoulli(e.p) ? 1 : 0;
            if (edge_state[ei] == 1 && !in_cluster[v]) {
                in_cluster[v] = true;
                frontier.push_back(v);
            }
        }
    }
    return in_cluster;
}

}  // namespace spreadout
