#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "spreadout/core/errors.hpp"
#include "spreadout/core/model.hpp"
#include "spreadout/core/region.hpp"

namespace spreadout {

/// Explicit small graph substrate for the exact oracles. Edge list is
/// duplicate-free; every endpoint is a listed site.
struct FiniteGraph {
    struct Edge {
        int a, b;
        double p;
    };
    std::vector<Point> sites;
    std::vector<Edge> edges;

    int size() const { return static_cast<int>(sites.size()); }

    int index_of(const Point& x) const {
        for (int i = 0; i < size(); ++i)
            if (sites[i] == x) return i;
        throw UsageError("FiniteGraph: point not a site: " + to_string(x));
    }

    void add_edge(const Point& u, const Point& v, double p) {
        int a = index_of(u), b = index_of(v);
        if (a == b) throw UsageError("FiniteGraph: loop edge");
        for (const auto& e : edges)
            if ((e.a == a && e.b == b) || (e.a == b && e.b == a))
                throw UsageError("FiniteGraph: duplicate edge");
        edges.push_back({a, b, p});
    }

    /// Induced spread-out graph on the given sites: all pairs within kernel
    /// range become edges with probability p_beta.
    static FiniteGraph induced(const SpreadOutModel& m, std::vector<Point> pts) {
        FiniteGraph g;
        g.sites = std::move(pts);
        for (int i = 0; i < g.size(); ++i)
            for (int j = i + 1; j < g.size(); ++j) {
                double p = m.edge_probability(g.sites[i], g.sites[j]);
                if (p > 0) g.edges.push_back({i, j, p});
            }
        return g;
    }
};

/// Open/closed bitmask over FiniteGraph.edges.
using EdgeConfig = uint32_t;

inline double config_weight(const FiniteGraph& g, EdgeConfig cfg) {
    double w = 1.0;
    for (size_t i = 0; i < g.edges.size(); ++i)
        w *= (cfg >> i & 1u) ? g.edges[i].p : 1.0 - g.edges[i].p;
    return w;
}

namespace detail {

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace detail

/// Component labels of the open subgraph restricted to region (an edge is
/// usable only when both endpoints lie in the region).
inline std::vector<int> open_components(const FiniteGraph& g, const Region& region, EdgeConfig cfg) {
    detail::Dsu dsu(g.size());
    for (size_t i = 0; i < g.edges.size(); ++i) {
        if (!(cfg >> i & 1u)) continue;
        const auto& e = g.edges[i];
        if (contains(region, g.sites[e.a]) && contains(region, g.sites[e.b])) dsu.unite(e.a, e.b);
    }
    std::vector<int> lab(g.size());
    for (int i = 0; i < g.size(); ++i) lab[i] = dsu.find(i);
    return lab;
}

inline void check_enumerable(const FiniteGraph& g, size_t max_edges = 30) {
    if (g.edges.size() > max_edges)
        throw CapacityError("exact enumeration limited to " + std::to_string(max_edges) + " edges");
}

/// Exact P[x <-> y inside region], summed over all 2^E configurations.
inline double enumerate_connect_prob(const FiniteGraph& g, const Region& region, const Point& x,
                                     const Point& y) {
    check_enumerable(g);
    int ix = g.index_of(x), iy = g.index_of(y);
    if (ix == iy) return 1.0;
    const uint64_t n_cfg = 1ull << g.edges.size();
    double total = 0;
    for (uint64_t cfg = 0; cfg < n_cfg; ++cfg) {
        auto lab = open_components(g, region, static_cast<EdgeConfig>(cfg));
        if (lab[ix] == lab[iy]) total += config_weight(g, static_cast<EdgeConfig>(cfg));
    }
    return total;
}

/// All-pairs exact two-point table inside region: T[a][b] = P[a <->^region b].
inline std::vector<std::vector<double>> connect_prob_table(const FiniteGraph& g, const Region& region) {
    check_enumerable(g);
    const int n = g.size();
    std::vector<std::vector<double>> t(n, std::vector<double>(n, 0.0));
    const uint64_t n_cfg = 1ull << g.edges.size();
    for (uint64_t cfg = 0; cfg < n_cfg; ++cfg) {
        double w = config_weight(g, static_cast<EdgeConfig>(cfg));
        auto lab = open_components(g, region, static_cast<EdgeConfig>(cfg));
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b)
                if (lab[a] == lab[b]) {
                    t[a][b] += w;
                    if (a != b) t[b][a] += w;
                }
    }
    return t;
}

/// p_{uv} on the substrate: the edge probability if {u,v} is a graph edge.
inline double substrate_edge_prob(const FiniteGraph& g, int a, int b) {
    for (const auto& e : g.edges)
        if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return e.p;
    return 0.0;
}

}  // namespace spreadout
