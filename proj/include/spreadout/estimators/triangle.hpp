#pragma once

#include <algorithm>
#include <vector>

#include "spreadout/estimators/basic.hpp"

namespace spreadout {

/// Windowed triangle diagram
///   ∇_R(beta) = sum_{x,z in Λ_R} P[0<->x] P[0<->z] P[0<->x-z]
/// estimated from three independent clusters C1, C2, C3 of the origin:
///   ∇_R = E #{(x,z) : x in C1 ∩ Λ_R, z in C2 ∩ Λ_R, x-z in C3}.
/// All requested radii share the same cluster draws, so increments between
/// nested windows are nonnegative sample by sample. At beta = 0 every window
/// gives exactly 1 (the (0,0) pair).
inline std::vector<Estimate> triangle_mc(const SpreadOutModel& m, const std::vector<int>& radii,
                                         const MCOptions& opt, const RngStream& stream) {
    if (radii.empty()) throw UsageError("triangle_mc: need at least one radius");
    for (size_t i = 1; i < radii.size(); ++i)
        if (radii[i] <= radii[i - 1]) throw UsageError("triangle_mc: radii must be increasing");
    const int r_max = radii.back();
    Point origin = Point::zero(m.d);
    unsigned workers = opt.workers > 0 ? static_cast<unsigned>(opt.workers) : default_workers();

    VecAcc acc = parallel_mc<VecAcc>(
        opt.n_samples, workers, stream, [&](CounterRng& rng, VecAcc& a) {
            ClusterSample c1 =
                explore_cluster(m, Full{}, origin, rng, opt.cluster_cap, nullptr, false);
            ClusterSample c2 =
                explore_cluster(m, Full{}, origin, rng, opt.cluster_cap, nullptr, false);
            ClusterSample c3 =
                explore_cluster(m, Full{}, origin, rng, opt.cluster_cap, nullptr, false);
            bool capped = c1.capped || c2.capped || c3.capped;
            std::vector<double> v(radii.size(), 0.0);
            if (!capped) {
                for (const Point& x : c1.sites) {
                    int rx = x.linf();
                    if (rx > r_max) continue;
                    for (const Point& z : c2.sites) {
                        int rz = z.linf();
                        if (rz > r_max) continue;
                        if (!c3.contains(x - z)) continue;
                        int r_pair = std::max(rx, rz);
                        for (size_t i = 0; i < radii.size(); ++i)
                            if (radii[i] >= r_pair) v[i] += 1.0;
                    }
                }
            }
            a.add(v, capped);
        });
    return acc.estimates(opt.n_samples);
}

}  // namespace spreadout
