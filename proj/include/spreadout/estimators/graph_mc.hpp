#pragma once

#include <vector>

#include "spreadout/core/estimate.hpp"
#include "spreadout/core/parallel.hpp"
#include "spreadout/estimators/error_terms.hpp"
#include "spreadout/percolation/graph_cluster.hpp"

namespace spreadout {

/// Monte-Carlo connection frequencies P[source <->^region w] for every site w
/// of a finite substrate, from N clusters of the source.
inline std::vector<double> mc_connect_row(const FiniteGraph& g, const Region& region,
                                          const Point& source, uint64_t n_samples,
                                          const RngStream& stream, unsigned workers = 0) {
    if (workers == 0) workers = default_workers();
    struct RowAcc {
        std::vector<double> cnt;
        uint64_t n = 0;
        void merge(const RowAcc& o) {
            if (cnt.size() < o.cnt.size()) cnt.resize(o.cnt.size(), 0.0);
            for (size_t i = 0; i < o.cnt.size(); ++i) cnt[i] += o.cnt[i];
            n += o.n;
        }
    };
    RowAcc acc = parallel_mc<RowAcc>(n_samples, workers, stream, [&](CounterRng& rng, RowAcc& a) {
        auto in = explore_cluster_graph(g, region, source, rng);
        if (a.cnt.size() < in.size()) a.cnt.resize(in.size(), 0.0);
        for (size_t i = 0; i < in.size(); ++i)
            if (in[i]) a.cnt[i] += 1.0;
        ++a.n;
    });
    std::vector<double> row(g.sites.size(), 0.0);
    for (size_t i = 0; i < acc.cnt.size(); ++i) row[i] = acc.cnt[i] / static_cast<double>(acc.n);
    return row;
}

/// MC two-point function on a substrate.
inline Estimate two_point_mc_graph(const FiniteGraph& g, const Region& region, const Point& x,
                                   const Point& y, uint64_t n_samples, const RngStream& stream) {
    int iy = g.index_of(y);
    unsigned workers = default_workers();
    ScalarAcc acc =
        parallel_mc<ScalarAcc>(n_samples, workers, stream, [&](CounterRng& rng, ScalarAcc& a) {
            auto in = explore_cluster_graph(g, region, x, rng);
            a.add(in[static_cast<size_t>(iy)] ? 1.0 : 0.0);
        });
    return mean_estimate(acc.sum, acc.sumsq, acc.n);
}

/// MC phi on a substrate: cluster of origin explored on graph edges inside
/// the region; each cluster site contributes its exact exterior lattice flux.
inline Estimate phi_mc_graph(const SpreadOutModel& m, const FiniteGraph& g, const Region& region,
                             const Point& origin, uint64_t n_samples, const RngStream& stream) {
    unsigned workers = default_workers();
    ScalarAcc acc =
        parallel_mc<ScalarAcc>(n_samples, workers, stream, [&](CounterRng& rng, ScalarAcc& a) {
            auto in = explore_cluster_graph(g, region, origin, rng);
            double s = 0;
            for (size_t i = 0; i < in.size(); ++i) {
                if (!in[i] || !contains(region, g.sites[i])) continue;
                s += m.p_beta *
                     static_cast<double>(exterior_neighbor_count(m, region, g.sites[i]));
            }
            a.add(s);
        });
    return mean_estimate(acc.sum, acc.sumsq, acc.n);
}

/// MC estimate of the reversed Simon-Lieb correction on a substrate. Both
/// displayed sums are assembled from MC two-point tables. Factors that share
/// a table source within one product are drawn from two independent table
/// sets (A/B), keeping every summand an unbiased product of independent
/// estimates; the standard error comes from independent whole-assembly
/// replicas.
inline Estimate error_term_mc_graph(const FiniteGraph& g, const Region& inner, const Region& outer,
                                    const Point& o, const Point& x, uint64_t n_per_row,
                                    int replicas, const RngStream& stream) {
    if (replicas < 2) throw UsageError("error_term_mc_graph: need >= 2 replicas");
    auto piv = pivot_edges(g, inner, outer);
    size_t n = g.sites.size();
    int io = g.index_of(o), ix = g.index_of(x);
    auto in_inner = [&](size_t i) { return contains(inner, g.sites[i]); };
    auto in_outer = [&](size_t i) { return contains(outer, g.sites[i]); };

    std::vector<double> reps;
    for (int r = 0; r < replicas; ++r) {
        RngStream rs = stream.child(static_cast<uint64_t>(r));
        auto table = [&](const Region& reg, uint64_t salt) {
            std::vector<std::vector<double>> t(n);
            for (size_t u = 0; u < n; ++u)
                t[u] = mc_connect_row(g, reg, g.sites[u], n_per_row,
                                      rs.child(salt * 1000 + u), 1);
            return t;
        };
        auto psA = table(inner, 1), psB = table(inner, 2);
        auto plA = table(outer, 3), plB = table(outer, 4);

        double term1 = 0;
        for (size_t u = 0; u < n; ++u) {
            if (!in_inner(u)) continue;
            double pou = psA[static_cast<size_t>(io)][u];
            if (pou == 0) continue;
            for (const auto& e : piv) {
                double head = pou * psA[u][static_cast<size_t>(e.y)] * e.p;
                if (head == 0) continue;
                for (size_t v = 0; v < n; ++v) {
                    if (!in_inner(v)) continue;
                    term1 += head * plA[static_cast<size_t>(e.z)][v] * psB[u][v] *
                             plA[v][static_cast<size_t>(ix)];
                }
            }
        }
        double term2 = 0;
        for (size_t u = 0; u < n; ++u) {
            if (!in_inner(u)) continue;
            double pou = psA[static_cast<size_t>(io)][u];
            if (pou == 0) continue;
            for (size_t i = 0; i < piv.size(); ++i) {
                for (size_t j = 0; j < piv.size(); ++j) {
                    if (i == j) continue;
                    const auto& e1 = piv[i];
                    const auto& e2 = piv[j];
                    double head = pou * psA[u][static_cast<size_t>(e1.y)] *
                                  psB[u][static_cast<size_t>(e2.y)] * e1.p * e2.p;
                    if (head == 0) continue;
                    for (size_t v = 0; v < n; ++v) {
                        if (!in_outer(v)) continue;
                        term2 += head * plA[static_cast<size_t>(e1.z)][v] *
                                 plB[static_cast<size_t>(e2.z)][v] *
                                 plA[v][static_cast<size_t>(ix)];
                    }
                }
            }
        }
        reps.push_back(term1 + term2);
    }
    double mean = 0;
    for (double v : reps) mean += v;
    mean /= static_cast<double>(reps.size());
    double var = 0;
    for (double v : reps) var += (v - mean) * (v - mean);
    var /= static_cast<double>(reps.size() - 1);
    Estimate e;
    e.value = mean;
    e.std_error = std::sqrt(var / static_cast<double>(reps.size()));
    e.n_samples = static_cast<uint64_t>(replicas) * n_per_row;
    return e;
}

}  // namespace spreadout
