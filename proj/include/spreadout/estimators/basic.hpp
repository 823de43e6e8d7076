#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "spreadout/core/estimate.hpp"
#include "spreadout/core/model.hpp"
#include "spreadout/core/parallel.hpp"
#include "spreadout/core/region.hpp"
#include "spreadout/percolation/cluster.hpp"
#include "spreadout/percolation/finite_graph.hpp"

namespace spreadout {

/// Accumulator for a fixed-length vector of per-sample statistics, sharing
/// one set of cluster draws across all components.
struct VecAcc {
    std::vector<double> sum, sumsq;
    uint64_t n = 0;
    uint64_t censored = 0;

    explicit VecAcc(size_t k = 0) : sum(k, 0.0), sumsq(k, 0.0) {}

    void add(const std::vector<double>& v, bool capped) {
        if (capped) {
            ++censored;
            return;
        }
        if (sum.size() < v.size()) {
            sum.resize(v.size(), 0.0);
            sumsq.resize(v.size(), 0.0);
        }
        for (size_t i = 0; i < v.size(); ++i) {
            sum[i] += v[i];
            sumsq[i] += v[i] * v[i];
        }
        ++n;
    }
    void merge(const VecAcc& o) {
        if (sum.size() < o.sum.size()) {
            sum.resize(o.sum.size(), 0.0);
            sumsq.resize(o.sum.size(), 0.0);
        }
        for (size_t i = 0; i < o.sum.size(); ++i) {
            sum[i] += o.sum[i];
            sumsq[i] += o.sumsq[i];
        }
        n += o.n;
        censored += o.censored;
    }
    std::vector<Estimate> estimates(uint64_t n_requested) const {
        double rate = n_requested > 0
                          ? static_cast<double>(censored) / static_cast<double>(n_requested)
                          : 0.0;
        if (rate > 0.01) throw CensoringError(rate);
        std::vector<Estimate> out;
        out.reserve(sum.size());
        for (size_t i = 0; i < sum.size(); ++i) {
            Estimate e = mean_estimate(sum[i], sumsq[i], n);
            e.censored_rate = rate;
            out.push_back(e);
        }
        return out;
    }
};

struct MCOptions {
    uint64_t n_samples = 100000;
    int workers = 0;  // 0 -> default_workers()
    uint64_t cluster_cap = kDefaultClusterCap;
    bool keyed_edges = false;
};

/// Monte-Carlo mean of a vector functional of the open cluster of `origin`
/// inside `region`. Capped clusters are excluded and tracked as censored.
inline std::vector<Estimate> mc_cluster_functional(
    const SpreadOutModel& m, const Region& region, const Point& origin, size_t n_stats,
    const MCOptions& opt, const RngStream& stream,
    const std::function<void(const ClusterSample&, std::vector<double>&)>& fn) {
    unsigned workers = opt.workers > 0 ? static_cast<unsigned>(opt.workers) : default_workers();
    VecAcc acc = parallel_mc<VecAcc>(
        opt.n_samples, workers, stream,
        [&](CounterRng& rng, VecAcc& a) {
            ClusterSample c =
                explore_cluster(m, region, origin, rng, opt.cluster_cap, nullptr, opt.keyed_edges);
            std::vector<double> v(n_stats, 0.0);
            if (!c.capped) fn(c, v);
            a.add(v, c.capped);
        });
    return acc.estimates(opt.n_samples);
}

/// P_beta[origin <->^region x], Monte Carlo (single target).
inline Estimate two_point_mc(const SpreadOutModel& m, const Region& region, const Point& origin,
                             const Point& x, const MCOptions& opt, const RngStream& stream) {
    if (x.dim != m.d) throw UsageError("two_point_mc: dimension mismatch");
    return mc_cluster_functional(m, region, origin, 1, opt, stream,
                                 [&](const ClusterSample& c, std::vector<double>& v) {
                                     v[0] = c.contains(x) ? 1.0 : 0.0;
                                 })[0];
}

/// P_beta[origin <->^region x_i] for several targets from common cluster draws.
inline std::vector<Estimate> two_point_mc_multi(const SpreadOutModel& m, const Region& region,
                                                const Point& origin, const std::vector<Point>& xs,
                                                const MCOptions& opt, const RngStream& stream) {
    return mc_cluster_functional(m, region, origin, xs.size(), opt, stream,
                                 [&](const ClusterSample& c, std::vector<double>& v) {
                                     for (size_t i = 0; i < xs.size(); ++i)
                                         v[i] = c.contains(xs[i]) ? 1.0 : 0.0;
                                 });
}

/// chi_region(beta) = E|C(origin) ∩ region|.
inline Estimate susceptibility_mc(const SpreadOutModel& m, const Region& region,
                                  const Point& origin, const MCOptions& opt,
                                  const RngStream& stream) {
    return mc_cluster_functional(m, region, origin, 1, opt, stream,
                                 [&](const ClusterSample& c, std::vector<double>& v) {
                                     v[0] = static_cast<double>(c.sites.size());
                                 })[0];
}

/// phi_beta(S) = sum_{y in S, z not in S} P[0 <->^S y] p_{yz}, Monte Carlo.
/// Rao-Blackwellized: instead of sampling the exterior edges, each cluster
/// site y contributes p_beta * |Λ_L(y)* \ S| exactly.
inline Estimate phi_mc(const SpreadOutModel& m, const Region& region, const Point& origin,
                       const MCOptions& opt, const RngStream& stream) {
    return mc_cluster_functional(
        m, region, origin, 1, opt, stream, [&](const ClusterSample& c, std::vector<double>& v) {
            double s = 0;
            for (const Point& y : c.sites)
                s += m.p_beta * static_cast<double>(exterior_neighbor_count(m, region, y));
            v[0] = s;
        })[0];
}

/// Exact phi for a finite substrate graph: the "region" S is the whole vertex
/// set of g; exterior flux uses the lattice kernel around each site.
inline double phi_exact_graph(const SpreadOutModel& m, const FiniteGraph& g, const Region& region,
                              const Point& origin) {
    auto table = connect_prob_table(g, region);
    int o = g.index_of(origin);
    if (o < 0) throw UsageError("phi_exact_graph: origin not in graph");
    double s = 0;
    for (size_t i = 0; i < g.sites.size(); ++i) {
        if (!contains(region, g.sites[i])) continue;
        s += table[static_cast<size_t>(o)][i] * m.p_beta *
             static_cast<double>(exterior_neighbor_count(m, region, g.sites[i]));
    }
    return s;
}

/// psi_beta(H_n) = sum over boundary-plane sites x != 0 of P[0 <->^{H_n} x].
/// The half-space is {x1 >= -n}; the functional counts cluster sites on the
/// plane x1 = -n, excluding the origin itself.
inline Estimate psi_mc(const SpreadOutModel& m, int n, const MCOptions& opt,
                       const RngStream& stream) {
    if (n < 0) throw UsageError("psi_mc: n must be >= 0");
    Region region = HalfSpace{n};
    Point origin = Point::zero(m.d);
    return mc_cluster_functional(m, region, origin, 1, opt, stream,
                                 [&](const ClusterSample& c, std::vector<double>& v) {
                                     double cnt = 0;
                                     for (const Point& y : c.sites)
                                         if (y[0] == -n && !y.is_zero()) cnt += 1.0;
                                     v[0] = cnt;
                                 })[0];
}

/// psi^[k]: same boundary sum restricted to |x| <= k.
inline Estimate psi_k_mc(const SpreadOutModel& m, int n, int k, const MCOptions& opt,
                         const RngStream& stream) {
    if (n < 0 || k < 0) throw UsageError("psi_k_mc: n, k must be >= 0");
    Region region = HalfSpace{n};
    Point origin = Point::zero(m.d);
    return mc_cluster_functional(m, region, origin, 1, opt, stream,
                                 [&](const ClusterSample& c, std::vector<double>& v) {
                                     double cnt = 0;
                                     for (const Point& y : c.sites)
                                         if (y[0] == -n && !y.is_zero() && y.linf() <= k)
                                             cnt += 1.0;
                                     v[0] = cnt;
                                 })[0];
}

/// Sum over the k-boundary shell of a block B of P[0 <->^B x] (origin counted
/// only if it lies on the shell and k > 0 semantics demand exclusion of 0 —
/// here the origin is excluded to match the psi convention).
inline Estimate shell_sum_mc(const SpreadOutModel& m, const GeneralizedBlock& block, int k,
                             const MCOptions& opt, const RngStream& stream) {
    if (k < 0) throw UsageError("shell_sum_mc: k must be >= 0");
    Region region = block;
    Point origin = Point::zero(m.d);
    return mc_cluster_functional(m, region, origin, 1, opt, stream,
                                 [&](const ClusterSample& c, std::vector<double>& v) {
                                     double cnt = 0;
                                     for (const Point& y : c.sites) {
                                         if (y.is_zero()) continue;
                                         if (boundary_distance(block, y) == k) cnt += 1.0;
                                     }
                                     v[0] = cnt;
                                 })[0];
}

}  // namespace spreadout
