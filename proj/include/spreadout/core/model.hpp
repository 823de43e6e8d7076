#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "spreadout/core/errors.hpp"
#include "spreadout/core/point.hpp"

namespace spreadout {

/// Spread-out model (d, L, beta): every pair at l-infinity distance in [1,L]
/// carries kernel weight c_L = 1/|Lambda_L^*| and opens with probability
/// p_beta = 1 - exp(-beta c_L).
struct SpreadOutModel {
    int d;
    int L;
    double beta;
    int64_t lambda_star;  // |Lambda_L^*| = (2L+1)^d - 1
    double c_L;
    double p_beta;

    SpreadOutModel(int d_, int L_, double beta_) : d(d_), L(L_), beta(beta_) {
        if (d < 1 || d > kMaxDim) throw UsageError("SpreadOutModel: d must be in [1,8]");
        if (L < 1) throw UsageError("SpreadOutModel: L must be >= 1");
        if (beta < 0) throw UsageError("SpreadOutModel: beta must be >= 0");
        int64_t v = 1;
        for (int i = 0; i < d; ++i) v *= (2 * L + 1);
        lambda_star = v - 1;
        c_L = 1.0 / static_cast<double>(lambda_star);
        p_beta = -std::expm1(-beta * c_L);
    }

    SpreadOutModel with_beta(double b) const { return SpreadOutModel(d, L, b); }

    static double lambda_star_count(int d, int L) {
        if (d < 1 || d > kMaxDim || L < 1) throw UsageError("lambda_star_count: bad d or L");
        double v = 1;
        for (int i = 0; i < d; ++i) v *= (2.0 * L + 1.0);
        return v - 1.0;
    }

    double kernel(const Point& u, const Point& v) const {
        if (u.dim != d || v.dim != d) throw UsageError("kernel: dimension mismatch");
        int32_t r = (u - v).linf();
        return (r >= 1 && r <= L) ? c_L : 0.0;
    }

    double edge_probability(const Point& u, const Point& v) const {
        if (u.dim != d || v.dim != d) throw UsageError("edge_probability: dimension mismatch");
        int32_t r = (u - v).linf();
        return (r >= 1 && r <= L) ? p_beta : 0.0;
    }

    /// Visits the (2L+1)^d - 1 points v with 1 <= |v-x| <= L, lexicographic
    /// order in the offsets. f: (const Point&) -> void.
    template <class F>
    void for_each_neighbor(const Point& x, F&& f) const {
        Point off(d);
        for (int i = 0; i < d; ++i) off.c[i] = -L;
        for (;;) {
            if (!off.is_zero()) f(x + off);
            int i = d - 1;
            while (i >= 0 && off.c[i] == L) off.c[i--] = -L;
            if (i < 0) break;
            ++off.c[i];
        }
    }

    /// k-th neighbor offset in the deterministic (lexicographic) order,
    /// k in [0, lambda_star). Skips the zero offset.
    Point neighbor_offset(int64_t k) const {
        // offsets enumerate the full box; index of 0 is the middle
        int64_t mid = lambda_star / 2;  // (box-1)/2 with box odd
        int64_t idx = (k < mid) ? k : k + 1;
        Point off(d);
        int w = 2 * L + 1;
        for (int i = d - 1; i >= 0; --i) {
            off.c[i] = static_cast<int32_t>(idx % w) - L;
            idx /= w;
        }
        return off;
    }

    std::vector<Point> neighborhood(const Point& x) const {
        std::vector<Point> out;
        out.reserve(static_cast<size_t>(lambda_star));
        for_each_neighbor(x, [&](const Point& v) { out.push_back(v); });
        return out;
    }
};

/// Edge key: unordered pair of packed endpoints, canonical order.
struct EdgeKey {
    PackedKey a, b;
    bool operator==(const EdgeKey& o) const { return a == o.a && b == o.b; }
};

inline EdgeKey edge_key(const Point& u, const Point& v) {
    PackedKey ku = pack(u), kv = pack(v);
    if (kv.hi < ku.hi || (kv.hi == ku.hi && kv.lo < ku.lo)) std::swap(ku, kv);
    return EdgeKey{ku, kv};
}

struct EdgeKeyHash {
    size_t operator()(const EdgeKey& k) const {
        return mix64(k.a.lo ^ mix64(k.a.hi ^ mix64(k.b.lo ^ mix64(k.b.hi))));
    }
};

}  // namespace spreadout
