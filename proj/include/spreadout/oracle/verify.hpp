#pragma once

#include <string>
#include <vector>

#include "spreadout/estimators/error_terms.hpp"
#include "spreadout/percolation/disjoint.hpp"
#include "spreadout/percolation/finite_graph.hpp"

namespace spreadout {

inline constexpr double kSlackTolerance = 1e-9;

/// Result of one exact inequality check: passes iff rhs - lhs >= -1e-9.
struct InequalityReport {
    std::string descriptor;
    double lhs = 0;
    double rhs = 0;
    double slack() const { return rhs - lhs; }
    bool passed() const { return slack() >= -kSlackTolerance; }
};

/// Compensated summation, used to confirm the enumeration sums are robust to
/// summation order.
struct KahanSum {
    double s = 0, c = 0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

/// Exact P[predicate(config)] over all configurations.
template <class Pred>
double enumerate_event_prob(const FiniteGraph& g, Pred&& pred, bool kahan = false) {
    check_enumerable(g);
    const uint64_t n_cfg = 1ull << g.edges.size();
    KahanSum ks;
    double plain = 0;
    for (uint64_t cfg = 0; cfg < n_cfg; ++cfg) {
        if (!pred(static_cast<EdgeConfig>(cfg))) continue;
        double w = config_weight(g, static_cast<EdgeConfig>(cfg));
        if (kahan)
            ks.add(w);
        else
            plain += w;
    }
    return kahan ? ks.value() : plain;
}

/// BK check: P[A ∘ B] <= P[A] P[B], all three exactly enumerated.
inline InequalityReport verify_bk(const FiniteGraph& g, const ConnEvent& A, const ConnEvent& B,
                                  bool kahan = false) {
    int ax = g.index_of(A.x), ay = g.index_of(A.y);
    int bx = g.index_of(B.x), by = g.index_of(B.y);
    auto holds = [&](EdgeConfig cfg, int s, int t) {
        std::vector<bool> open(g.edges.size());
        for (size_t i = 0; i < g.edges.size(); ++i) open[i] = (cfg >> i & 1u);
        return detail::connected_in(g, open, s, t);
    };
    double pa = enumerate_event_prob(g, [&](EdgeConfig c) { return holds(c, ax, ay); }, kahan);
    double pb = enumerate_event_prob(g, [&](EdgeConfig c) { return holds(c, bx, by); }, kahan);
    double pab = enumerate_event_prob(
        g, [&](EdgeConfig c) { return disjoint_occurrence_pair(g, c, A, B); }, kahan);
    return {"bk " + to_string(A.x) + "<->" + to_string(A.y) + " . " + to_string(B.x) + "<->" +
                to_string(B.y),
            pab, pa * pb};
}

/// Tree bound: P[o <->^S a and o <->^S b] <= sum_u P_S[o,u] P_S[u,a] P_S[u,b].
inline InequalityReport verify_tree_bound(const FiniteGraph& g, const Region& S, const Point& o,
                                          const Point& a, const Point& b, bool kahan = false) {
    int io = g.index_of(o), ia = g.index_of(a), ib = g.index_of(b);
    double lhs = enumerate_event_prob(
        g,
        [&](EdgeConfig cfg) {
            auto lab = open_components(g, S, cfg);
            return lab[io] == lab[ia] && lab[io] == lab[ib];
        },
        kahan);
    auto ps = connect_prob_table(g, S);
    KahanSum rhs;
    for (size_t u = 0; u < g.sites.size(); ++u) {
        if (!contains(S, g.sites[u])) continue;
        rhs.add(ps[static_cast<size_t>(io)][u] * ps[u][static_cast<size_t>(ia)] *
                ps[u][static_cast<size_t>(ib)]);
    }
    return {"tree " + to_string(o) + "->" + to_string(a) + "," + to_string(b), lhs, rhs.value()};
}

/// Common right-hand side of the Simon-Lieb inequalities:
/// P_S[o,x] + sum over pivots (y in S, z in Λ\S) P_S[o,y] p_yz P_Λ[z,x].
inline double simon_lieb_rhs(const FiniteGraph& g, const Region& S, const Region& Lam,
                             const Point& o, const Point& x) {
    auto ps = connect_prob_table(g, S);
    auto pl = connect_prob_table(g, Lam);
    int io = g.index_of(o), ix = g.index_of(x);
    KahanSum s;
    s.add(ps[static_cast<size_t>(io)][static_cast<size_t>(ix)]);
    for (const auto& e : pivot_edges(g, S, Lam))
        s.add(ps[static_cast<size_t>(io)][static_cast<size_t>(e.y)] * e.p *
              pl[static_cast<size_t>(e.z)][static_cast<size_t>(ix)]);
    return s.value();
}

/// Simon-Lieb upper bound: P_Λ[o,x] <= rhs.
inline InequalityReport verify_simon_lieb(const FiniteGraph& g, const Region& S, const Region& Lam,
                                          const Point& o, const Point& x) {
    double lhs = enumerate_connect_prob(g, Lam, o, x);
    return {"simon-lieb " + to_string(o) + "->" + to_string(x), lhs, simon_lieb_rhs(g, S, Lam, o, x)};
}

/// Reversed Simon-Lieb: P_Λ[o,x] >= rhs_SL - E(S,Λ,o,x); reported as
/// lhs = rhs_SL - E and rhs = P_Λ[o,x] so the uniform "lhs <= rhs" check
/// applies.
inline InequalityReport verify_reversed(const FiniteGraph& g, const Region& S, const Region& Lam,
                                        const Point& o, const Point& x) {
    double p = enumerate_connect_prob(g, Lam, o, x);
    double lower = simon_lieb_rhs(g, S, Lam, o, x) - error_term_graph(g, S, Lam, o, x);
    return {"reversed-sl " + to_string(o) + "->" + to_string(x), lower, p};
}

}  // namespace spreadout
