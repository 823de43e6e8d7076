#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "spreadout/core/model.hpp"
#include "spreadout/core/rng.hpp"
#include "spreadout/percolation/finite_graph.hpp"

namespace spreadout {

/// Step distribution of a lattice walk. Two representations:
///  - UniformSpread: uniform on Λ_L* (the kernel J), sampled in O(1) by
///    indexing into the deterministic offset order;
///  - Tabulated: explicit (offset, mass) pairs with a CDF, covering rescaled
///    steps and general shell-supported members.
struct StepDistribution {
    enum class Kind { UniformSpread, Tabulated } kind = Kind::UniformSpread;
    int d = 1;
    int L = 1;  // UniformSpread range
    int m = 1;  // nominal scale (support in Λ_{2m} \ Λ_{m-1} for shell laws)

    std::vector<Point> offsets;  // Tabulated support
    std::vector<double> mass;
    std::vector<double> cdf;

    static StepDistribution uniform_spread(int d, int L) {
        StepDistribution s;
        s.kind = Kind::UniformSpread;
        s.d = d;
        s.L = L;
        s.m = 1;
        return s;
    }

    static StepDistribution tabulated(int d, int m, std::vector<Point> offs,
                                      std::vector<double> masses) {
        if (offs.size() != masses.size() || offs.empty())
            throw UsageError("StepDistribution: empty or mismatched table");
        StepDistribution s;
        s.kind = Kind::Tabulated;
        s.d = d;
        s.m = m;
        s.offsets = std::move(offs);
        s.mass = std::move(masses);
        double tot = 0;
        for (double w : s.mass) {
            if (w < 0) throw UsageError("StepDistribution: negative mass");
            tot += w;
        }
        if (std::fabs(tot - 1.0) > 1e-9)
            throw UsageError("StepDistribution: masses sum to " + std::to_string(tot));
        s.cdf.resize(s.mass.size());
        double run = 0;
        for (size_t i = 0; i < s.mass.size(); ++i) {
            run += s.mass[i];
            s.cdf[i] = run;
        }
        s.cdf.back() = 1.0;
        return s;
    }

    /// Uniform on the shell Λ_{2m} \ Λ_{m-1}: the simplest member of the
    /// shell-supported symmetric class at scale m.
    static StepDistribution shell_uniform(int d, int m) {
        if (m < 1) throw UsageError("shell_uniform: m >= 1");
        std::vector<Point> offs;
        Point off(d);
        for (int i = 0; i < d; ++i) off.c[i] = -2 * m;
        for (;;) {
            int32_t r = off.linf();
            if (r >= m && r <= 2 * m) offs.push_back(off);
            int i = d - 1;
            while (i >= 0 && off.c[i] == 2 * m) off.c[i--] = -2 * m;
            if (i < 0) break;
            ++off.c[i];
        }
        std::vector<double> w(offs.size(), 1.0 / static_cast<double>(offs.size()));
        return tabulated(d, m, std::move(offs), std::move(w));
    }

    Point sample(CounterRng& rng) const {
        if (kind == Kind::UniformSpread) {
            SpreadOutModel ref(d, L, 1.0);  // geometry only
            return ref.neighbor_offset(
                static_cast<int64_t>(rng.below(static_cast<uint64_t>(ref.lambda_star))));
        }
        double u = rng.next_unit();
        size_t i = static_cast<size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        if (i >= offsets.size()) i = offsets.size() - 1;
        return offsets[i];
    }

    /// sigma^2 = E |X_1|_2^2, by direct summation over the support.
    double sigma2() const {
        if (kind == Kind::UniformSpread) {
            // E sum_i X_i^2 with X uniform on the punctured box: the sum over
            // the full box is d * (2L+1)^{d-1} * sum_{k=-L..L} k^2, and the
            // removed center contributes 0.
            double lam = SpreadOutModel::lambda_star_count(d, L);
            double per_axis = static_cast<double>(L) * (L + 1) * (2 * L + 1) / 3.0;
            double box_others = std::pow(2.0 * L + 1.0, d - 1);
            return d * box_others * per_axis / lam;
        }
        double s = 0;
        for (size_t i = 0; i < offsets.size(); ++i) {
            double n2 = 0;
            for (int j = 0; j < d; ++j) n2 += double(offsets[i][j]) * offsets[i][j];
            s += mass[i] * n2;
        }
        return s;
    }

    /// Max-norm reach of a single step.
    int max_reach() const {
        if (kind == Kind::UniformSpread) return L;
        int r = 0;
        for (const Point& o : offsets) r = std::max<int>(r, o.linf());
        return r;
    }
};

/// Rescaled step law at scale m: mass at v (outside Λ_{m-1}) proportional to
/// sum over w in Λ_{m-1} of P[0 <->^{Λ_{m-1}} w] p_{wv}, normalized by the
/// total exterior flux. With m = 1 this is exactly the kernel J.
/// The restricted two-point table is exact (enumeration on the induced box)
/// when the box's induced edge set is small enough, else MC-tabulated.
inline StepDistribution rescaled_step(const SpreadOutModel& mod, int m,
                                      const std::vector<double>* mc_table = nullptr,
                                      const std::vector<Point>* mc_sites = nullptr) {
    if (m < 1) throw UsageError("rescaled_step: m >= 1");
    if (m == 1) return StepDistribution::uniform_spread(mod.d, mod.L);

    // Sites of Λ_{m-1} and their two-point values from the origin.
    std::vector<Point> sites;
    std::vector<double> val;
    if (mc_table != nullptr) {
        if (mc_sites == nullptr || mc_table->size() != mc_sites->size())
            throw UsageError("rescaled_step: table/sites mismatch");
        sites = *mc_sites;
        val = *mc_table;
    } else {
        Point off(mod.d);
        for (int i = 0; i < mod.d; ++i) off.c[i] = -(m - 1);
        for (;;) {
            sites.push_back(off);
            int i = mod.d - 1;
            while (i >= 0 && off.c[i] == m - 1) off.c[i--] = -(m - 1);
            if (i < 0) break;
            ++off.c[i];
        }
        FiniteGraph g = FiniteGraph::induced(mod, sites);
        Region box = Box{Point::zero(mod.d), m - 1};
        Point origin = Point::zero(mod.d);
        val.reserve(sites.size());
        for (const Point& w : sites) val.push_back(enumerate_connect_prob(g, box, origin, w));
    }

    // Distribute each interior weight over its exterior kernel neighbors.
    std::unordered_map<PackedKey, double, PackedKeyHash> mass;
    std::unordered_map<PackedKey, Point, PackedKeyHash> pts;
    double phi = 0;
    for (size_t i = 0; i < sites.size(); ++i) {
        if (val[i] == 0) continue;
        mod.for_each_neighbor(sites[i], [&](const Point& v) {
            if (v.linf() <= m - 1) return;
            double w = val[i] * mod.p_beta;
            mass[pack(v)] += w;
            pts.emplace(pack(v), v);
            phi += w;
        });
    }
    if (phi <= 0) throw ConsistencyError("rescaled_step: zero exterior flux (degenerate)");

    std::vector<Point> offs;
    std::vector<double> w;
    for (auto& kv : mass) {
        offs.push_back(pts.at(kv.first));
        w.push_back(kv.second / phi);
    }
    // deterministic order for reproducible sampling
    std::vector<size_t> idx(offs.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        for (int j = 0; j < mod.d; ++j)
            if (offs[a][j] != offs[b][j]) return offs[a][j] < offs[b][j];
        return false;
    });
    std::vector<Point> offs2;
    std::vector<double> w2;
    for (size_t i : idx) {
        offs2.push_back(offs[i]);
        w2.push_back(w[i]);
    }
    double tot = 0;
    for (double x : w2) tot += x;
    if (std::fabs(tot - 1.0) > 1e-6)
        throw ConsistencyError("rescaled_step: normalization off by " + std::to_string(tot - 1.0));
    // renormalize the residual rounding so the tabulated invariant (1e-9) holds
    for (double& x : w2) x /= tot;
    return StepDistribution::tabulated(mod.d, m, std::move(offs2), std::move(w2));
}

}  // namespace spreadout
