#pragma once

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "spreadout/core/model.hpp"
#include "spreadout/core/region.hpp"
#include "spreadout/core/rng.hpp"

namespace spreadout {

/// The explored open cluster of origin inside a region. Sites are stored in
/// BFS order (deterministic for a fixed rng stream); membership queries go
/// through the packed-key hash set. No global site array is ever allocated,
/// so half-space and full-lattice regions cost only the cluster itself.
struct ClusterSample {
    Point origin;
    std::vector<Point> sites;  // BFS order, sites[0] == origin
    std::unordered_set<PackedKey, PackedKeyHash> site_set;
    bool capped = false;

    bool contains(const Point& x) const { return site_set.count(pack(x)) > 0; }
    uint64_t size() const { return sites.size(); }
};

/// Touched-edge record, kept only when a test asks for it; the hot path
/// skips the bookkeeping entirely.
struct EdgeRecord {
    Point a, b;
    bool open;
};

inline constexpr uint64_t kDefaultClusterCap = 1000000;

/// BFS cluster exploration with lazy on-demand edge sampling. For each
/// frontier site the (2L+1)^d - 1 spread-out neighbors are scanned in a
/// deterministic lexicographic order; closed edges are jumped over with a
/// geometric skip, so the cost per site is O(1 + #open edges) rather than
/// O(|Lambda_L^*|). Edges between two already-visited sites cannot change
/// membership, so re-deciding them leaves the cluster law exact.
///
/// A sample is capped (right-censored) when an open edge would grow the
/// cluster past `cap` sites.
///
/// keyed_edges = true switches to per-edge uniforms derived from the edge
/// key: the same stream then yields clusters that are monotone-coupled in
/// beta (an edge opens iff U_edge < p_beta). O(|Lambda_L^*|) per site; used
/// by coupling tests, not by the hot path.
inline ClusterSample explore_cluster(const SpreadOutModel& m, const Region& region, const Point& origin,
                                     CounterRng& rng, uint64_t cap = kDefaultClusterCap,
                                     std::vector<EdgeRecord>* touched = nullptr,
                                     bool keyed_edges = false) {
    if (origin.dim != m.d) throw UsageError("explore_cluster: origin dimension mismatch");
    if (!contains(region, origin)) throw UsageError("explore_cluster: origin not in region");
    if (cap < 1) throw UsageError("explore_cluster: cap must be >= 1");

    const bool wrap = std::holds_alternative<Torus>(region);
    auto canon = [&](const Point& p) { return wrap ? torus_wrap(std::get<Torus>(region), p) : p; };

    ClusterSample out;
    out.origin = origin;
    Point start = canon(origin);
    out.sites.push_back(start);
    out.site_set.insert(pack(start));

    std::unordered_set<EdgeKey, EdgeKeyHash> sampled;  // only when recording
    const double p = m.p_beta;

    // returns false once the sample is capped
    auto grow = [&](const Point& v) -> bool {
        PackedKey kv = pack(v);
        if (out.site_set.count(kv)) return true;
        if (out.sites.size() >= cap) {
            out.capped = true;
            return false;
        }
        out.site_set.insert(kv);
        out.sites.push_back(v);
        return true;
    };

    size_t head = 0;
    while (head < out.sites.size() && !out.capped) {
        Point y = out.sites[head++];

        if (keyed_edges) {
            m.for_each_neighbor(y, [&](const Point& vraw) {
                if (out.capped) return;
                Point v = canon(vraw);
                if (!wrap && !contains(region, v)) return;
                EdgeKey ek = edge_key(y, v);
                if (sampled.count(ek)) return;
                sampled.insert(ek);
                double u = static_cast<double>(mix64(rng.key() ^ EdgeKeyHash{}(ek)) >> 11) * 0x1.0p-53;
                bool open = u < p;
                if (touched != nullptr) touched->push_back({y, v, open});
                if (open) grow(v);
            });
        } else {
            if (p <= 0) continue;
            const int64_t n_nb = m.lambda_star;
            int64_t idx = static_cast<int64_t>(rng.geometric_failures(p));
            while (idx < n_nb && !out.capped) {
                Point vraw = y + m.neighbor_offset(idx);
                Point v = canon(vraw);
                if (wrap || contains(region, v)) {
                    if (touched != nullptr) {
                        EdgeKey ek = edge_key(y, v);
                        if (!sampled.count(ek)) {
                            sampled.insert(ek);
                            touched->push_back({y, v, true});
                        }
                    }
                    grow(v);
                }
                idx += 1 + static_cast<int64_t>(rng.geometric_failures(p));
            }
        }
    }
    return out;

    // under the geometric skip, closed edges are decided in bulk and never
    // materialized; the touched record holds each decided-open edge once.
}

}  // namespace spreadout
