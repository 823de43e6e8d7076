#pragma once

#include <unordered_map>
#include <vector>

#include "spreadout/estimators/basic.hpp"
#include "spreadout/percolation/finite_graph.hpp"

namespace spreadout {

/// Directed pivot edge y -> z with y inside S and z in Λ \ S.
struct PivotEdge {
    int y = 0, z = 0;
    double p = 0;
};

inline std::vector<PivotEdge> pivot_edges(const FiniteGraph& g, const Region& inner,
                                          const Region& outer) {
    std::vector<PivotEdge> out;
    for (const auto& e : g.edges) {
        const Point& a = g.sites[static_cast<size_t>(e.a)];
        const Point& b = g.sites[static_cast<size_t>(e.b)];
        bool a_in = contains(inner, a), b_in = contains(inner, b);
        bool a_out = contains(outer, a), b_out = contains(outer, b);
        if (a_in && b_out && !b_in) out.push_back({e.a, e.b, e.p});
        if (b_in && a_out && !a_in) out.push_back({e.b, e.a, e.p});
    }
    return out;
}

/// Exact correction term of the reversed Simon-Lieb inequality on a finite
/// substrate graph: two-arm term plus double-pivot term, both evaluated from
/// the all-pairs exact connection tables.
inline double error_term_graph(const FiniteGraph& g, const Region& inner, const Region& outer,
                               const Point& o, const Point& x) {
    auto ps = connect_prob_table(g, inner);   // P[ . <->^S . ]
    auto pl = connect_prob_table(g, outer);   // P[ . <->^Λ . ]
    auto piv = pivot_edges(g, inner, outer);
    int io = g.index_of(o), ix = g.index_of(x);
    size_t n = g.sites.size();
    auto in_inner = [&](size_t i) { return contains(inner, g.sites[i]); };
    auto in_outer = [&](size_t i) { return contains(outer, g.sites[i]); };

    double term1 = 0;
    for (size_t u = 0; u < n; ++u) {
        if (!in_inner(u)) continue;
        double pou = ps[static_cast<size_t>(io)][u];
        if (pou == 0) continue;
        for (const auto& e : piv) {
            double head = pou * ps[u][static_cast<size_t>(e.y)] * e.p;
            if (head == 0) continue;
            for (size_t v = 0; v < n; ++v) {
                if (!in_inner(v)) continue;
                term1 += head * pl[static_cast<size_t>(e.z)][v] * ps[u][v] *
                         pl[v][static_cast<size_t>(ix)];
            }
        }
    }

    double term2 = 0;
    for (size_t u = 0; u < n; ++u) {
        if (!in_inner(u)) continue;
        double pou = ps[static_cast<size_t>(io)][u];
        if (pou == 0) continue;
        for (size_t i = 0; i < piv.size(); ++i) {
            for (size_t j = 0; j < piv.size(); ++j) {
                if (i == j) continue;  // the two pivot edges must differ
                const auto& e1 = piv[i];
                const auto& e2 = piv[j];
                double head = pou * ps[u][static_cast<size_t>(e1.y)] *
                              ps[u][static_cast<size_t>(e2.y)] * e1.p * e2.p;
                if (head == 0) continue;
                for (size_t v = 0; v < n; ++v) {
                    if (!in_outer(v)) continue;
                    term2 += head * pl[static_cast<size_t>(e1.z)][v] *
                             pl[static_cast<size_t>(e2.z)][v] * pl[v][static_cast<size_t>(ix)];
                }
            }
        }
    }
    return term1 + term2;
}

/// Monte-Carlo error amplitude of a centred box B = Λ_R: the reversed
/// Simon-Lieb correction with origin o = 0, ambient graph the full lattice,
/// and the trailing two-point factor dropped. The unbounded sum over v in
/// the double-pivot term is truncated to Λ_{v_window}; the window should be
/// taken a few multiples of R + L.
struct ErrorAmplitude {
    double term1 = 0;
    double term2 = 0;
    double total() const { return term1 + term2; }
};

inline ErrorAmplitude error_amplitude_mc(const SpreadOutModel& m, int R, int v_window,
                                         const MCOptions& opt, const RngStream& stream) {
    if (R < 0 || v_window < R) throw UsageError("error_amplitude_mc: need v_window >= R >= 0");
    Point origin = Point::zero(m.d);
    Region box = Box{origin, R};

    // Enumerate the box sites.
    std::vector<Point> sites;
    {
        Point off(m.d);
        for (int i = 0; i < m.d; ++i) off.c[i] = -R;
        for (;;) {
            sites.push_back(off);
            int i = m.d - 1;
            while (i >= 0 && off.c[i] == R) off.c[i--] = -R;
            if (i < 0) break;
            ++off.c[i];
        }
    }
    std::unordered_map<PackedKey, size_t, PackedKeyHash> site_index;
    for (size_t i = 0; i < sites.size(); ++i) site_index[pack(sites[i])] = i;
    size_t n = sites.size();

    // Directed lattice pivot edges y -> z, y in B, z outside B, |z-y| <= L.
    struct LatticePivot {
        size_t y;
        Point z;
    };
    std::vector<LatticePivot> piv;
    for (size_t yi = 0; yi < n; ++yi)
        m.for_each_neighbor(sites[yi], [&](const Point& z) {
            if (z.linf() > R) piv.push_back({yi, z});
        });

    // Restricted two-point tables P[u <->^B w], one MC cluster pass per source.
    std::vector<std::vector<double>> ps(n, std::vector<double>(n, 0.0));
    for (size_t ui = 0; ui < n; ++ui) {
        auto est = mc_cluster_functional(
            m, box, sites[ui], n, opt, stream.child(ui),
            [&](const ClusterSample& c, std::vector<double>& v) {
                for (const Point& w : c.sites) {
                    auto it = site_index.find(pack(w));
                    if (it != site_index.end()) v[it->second] = 1.0;
                }
            });
        for (size_t wi = 0; wi < n; ++wi) ps[ui][wi] = est[wi].value;
    }

    // Full-space two-point g(x) = P[0 <-> x] for |x| <= 2*v_window + L,
    // from a single batch of clusters (translation invariance).
    std::unordered_map<PackedKey, double, PackedKeyHash> g_table;
    {
        int g_range = 2 * v_window + m.L;
        unsigned workers =
            opt.workers > 0 ? static_cast<unsigned>(opt.workers) : default_workers();
        struct MapAcc {
            std::unordered_map<PackedKey, double, PackedKeyHash> cnt;
            uint64_t n = 0, censored = 0;
            void merge(const MapAcc& o) {
                for (const auto& kv : o.cnt) cnt[kv.first] += kv.second;
                n += o.n;
                censored += o.censored;
            }
        };
        MapAcc acc = parallel_mc<MapAcc>(
            opt.n_samples, workers, stream.child(900001), [&](CounterRng& rng, MapAcc& a) {
                ClusterSample c =
                    explore_cluster(m, Full{}, origin, rng, opt.cluster_cap, nullptr, false);
                if (c.capped) {
                    ++a.censored;
                    return;
                }
                for (const Point& w : c.sites)
                    if (w.linf() <= g_range) a.cnt[pack(w)] += 1.0;
                ++a.n;
            });
        double rate = static_cast<double>(acc.censored) / static_cast<double>(opt.n_samples);
        if (rate > 0.01) throw CensoringError(rate);
        for (auto& kv : acc.cnt) kv.second /= static_cast<double>(acc.n);
        g_table = std::move(acc.cnt);
    }
    auto g_of = [&](const Point& x) {
        auto it = g_table.find(pack(x));
        return it == g_table.end() ? 0.0 : it->second;
    };

    size_t io = site_index.at(pack(origin));
    ErrorAmplitude out;

    for (size_t u = 0; u < n; ++u) {
        double pou = ps[io][u];
        if (pou == 0) continue;
        for (const auto& e : piv) {
            double head = pou * ps[u][e.y] * m.p_beta;
            if (head == 0) continue;
            for (size_t v = 0; v < n; ++v)
                out.term1 += head * g_of(sites[v] - e.z) * ps[u][v];
        }
    }

    // v ranges over Λ_{v_window} in the double-pivot term.
    std::vector<Point> vs;
    {
        Point off(m.d);
        for (int i = 0; i < m.d; ++i) off.c[i] = -v_window;
        for (;;) {
            vs.push_back(off);
            int i = m.d - 1;
            while (i >= 0 && off.c[i] == v_window) off.c[i--] = -v_window;
            if (i < 0) break;
            ++off.c[i];
        }
    }
    for (size_t u = 0; u < n; ++u) {
        double pou = ps[io][u];
        if (pou == 0) continue;
        for (size_t i = 0; i < piv.size(); ++i) {
            for (size_t j = 0; j < piv.size(); ++j) {
                if (i == j) continue;
                double head = pou * ps[u][piv[i].y] * ps[u][piv[j].y] * m.p_beta * m.p_beta;
                if (head == 0) continue;
                for (const Point& v : vs)
                    out.term2 += head * g_of(v - piv[i].z) * g_of(v - piv[j].z);
            }
        }
    }
    return out;
}

}  // namespace spreadout
