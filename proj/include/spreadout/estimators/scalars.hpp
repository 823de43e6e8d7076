#pragma once

#include <cmath>
#include <optional>

#include "spreadout/estimators/basic.hpp"
#include "spreadout/estimators/fit.hpp"

namespace spreadout {

/// beta0(d, L): the unique beta with |Λ_L*| p_beta = 1, i.e. the expected
/// number of open edges at the origin equals one. Closed form:
/// beta0 = -|Λ_L*| ln(1 - 1/|Λ_L*|).
inline double beta0_closed_form(int d, int L) {
    double lam = SpreadOutModel::lambda_star_count(d, L);
    return -lam * std::log1p(-1.0 / lam);
}

/// Independent root-finder for the same quantity: bisection on
/// f(beta) = |Λ_L*| p_beta - 1, used to cross-check the closed form.
inline double beta0_bisect(int d, int L, double tol = 1e-12) {
    double lam = SpreadOutModel::lambda_star_count(d, L);
    auto f = [&](double b) { return lam * (-std::expm1(-b / lam)) - 1.0; };
    double lo = 0.5, hi = 4.0;
    if (f(lo) > 0 || f(hi) < 0) throw ConsistencyError("beta0_bisect: bracket failed");
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        (f(mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// c(d) = |log(1 - 1/(4 d^2))| / (2 log 2).
inline double small_cluster_constant(int d) {
    if (d < 1) throw UsageError("small_cluster_constant: d >= 1");
    return std::fabs(std::log1p(-1.0 / (4.0 * d * d))) / (2.0 * std::log(2.0));
}

struct SharpLengthResult {
    int n = 0;               // first box radius with phi <= 1 - eps (cap if unbounded)
    bool bounded = true;     // false when no radius up to the cap qualifies
    double phi_at_n = 0;     // estimate at the returned radius
    double phi_se = 0;
    bool ambiguous = false;  // estimate within 4 SE of the threshold after retry
};

/// L_beta(eps) = inf{ n >= 1 : phi_beta(Λ_n) <= 1 - eps }, located by
/// doubling to bracket the crossing and bisecting inside the bracket.
/// If the deciding estimate sits within 4 SE of the threshold the run is
/// repeated once with 4x the samples; if still too close, `ambiguous` is set.
inline SharpLengthResult sharp_length(const SpreadOutModel& m, double eps, const MCOptions& opt,
                                      const RngStream& stream, int n_max = 1 << 14) {
    if (eps <= 0 || eps >= 1) throw UsageError("sharp_length: eps in (0,1)");
    const double thr = 1.0 - eps;
    Point origin = Point::zero(m.d);
    uint64_t probe = 0;
    bool any_ambiguous = false;

    auto phi_at = [&](int n) -> Estimate {
        MCOptions o = opt;
        for (int attempt = 0; attempt < 2; ++attempt) {
            Estimate e = phi_mc(m, Box{origin, n}, origin, o, stream.child(1000 + probe++));
            if (std::fabs(e.value - thr) > 4.0 * e.std_error || e.std_error == 0) return e;
            o.n_samples *= 4;  // one retry with more samples near the threshold
        }
        Estimate e = phi_mc(m, Box{origin, n}, origin, o, stream.child(1000 + probe++));
        if (std::fabs(e.value - thr) <= 4.0 * e.std_error) any_ambiguous = true;
        return e;
    };

    // Doubling phase: find the first power-of-two radius at or below threshold.
    int hi = 1;
    Estimate e_hi = phi_at(hi);
    if (e_hi.value <= thr) return {1, true, e_hi.value, e_hi.std_error, any_ambiguous};
    int lo = 1;
    for (;;) {
        lo = hi;
        hi *= 2;
        if (hi > n_max) return {n_max, false, e_hi.value, e_hi.std_error, any_ambiguous};
        e_hi = phi_at(hi);
        if (e_hi.value <= thr) break;
    }
    // Bisection: phi(lo) > thr, phi(hi) <= thr.
    while (hi - lo > 1) {
        int mid = lo + (hi - lo) / 2;
        Estimate e_mid = phi_at(mid);
        if (e_mid.value <= thr) {
            hi = mid;
            e_hi = e_mid;
        } else {
            lo = mid;
        }
    }
    return {hi, true, e_hi.value, e_hi.std_error, any_ambiguous};
}

/// Pseudo-critical point: the smallest beta (within `beta_tol`) at which the
/// cluster of the origin hits the cap with empirical frequency above
/// `rate_thr`. Probes run sequentially with early exit once the verdict for
/// the current beta is decided, so the bisection is deterministic and cheap
/// on the subcritical side.
struct PseudoCriticalResult {
    double beta = 0;
    double rate_at_beta = 0;
};

inline PseudoCriticalResult pseudo_critical(const SpreadOutModel& base, double beta_lo,
                                            double beta_hi, const RngStream& stream,
                                            uint64_t n_probe = 4000, double rate_thr = 1e-3,
                                            double beta_tol = 1e-3,
                                            uint64_t cap = kDefaultClusterCap) {
    if (!(beta_lo < beta_hi)) throw UsageError("pseudo_critical: need beta_lo < beta_hi");
    uint64_t probe_id = 0;
    // Needed cap hits to call a beta "supercritical" at the given threshold.
    const uint64_t need = static_cast<uint64_t>(rate_thr * static_cast<double>(n_probe)) + 1;

    auto is_super = [&](double beta, double* rate_out) {
        SpreadOutModel m = base.with_beta(beta);
        Point origin = Point::zero(m.d);
        RngStream s = stream.child(500000 + probe_id++);
        uint64_t capped = 0;
        for (uint64_t i = 0; i < n_probe; ++i) {
            CounterRng rng(s.child(i));
            ClusterSample c = explore_cluster(m, Full{}, origin, rng, cap, nullptr, false);
            if (c.capped && ++capped >= need) {
                if (rate_out) *rate_out = static_cast<double>(capped) / static_cast<double>(i + 1);
                return true;
            }
        }
        if (rate_out) *rate_out = static_cast<double>(capped) / static_cast<double>(n_probe);
        return false;
    };

    double rate_hi = 0;
    if (!is_super(beta_hi, &rate_hi))
        throw ConsistencyError("pseudo_critical: upper beta is not supercritical at this cap");
    if (is_super(beta_lo, nullptr))
        throw ConsistencyError("pseudo_critical: lower beta already supercritical");
    double lo = beta_lo, hi = beta_hi;
    while (hi - lo > beta_tol) {
        double mid = 0.5 * (lo + hi);
        if (is_super(mid, &rate_hi))
            hi = mid;
        else
            lo = mid;
    }
    return {hi, rate_hi};
}

/// Correlation length from two-point decay along the first axis:
/// fit log g(r) ~ a - r/xi over the given radii; returns xi and its SE via
/// the slope error.
struct CorrelationLength {
    double xi = 0;
    double xi_se = 0;
    LineFit fit;
};

inline CorrelationLength correlation_length_fit(const std::vector<double>& r,
                                                const std::vector<Estimate>& g) {
    if (r.size() != g.size() || r.size() < 2)
        throw UsageError("correlation_length_fit: need >= 2 matching points");
    std::vector<double> x, y, w;
    for (size_t i = 0; i < r.size(); ++i) {
        if (g[i].value <= 0) continue;
        x.push_back(r[i]);
        y.push_back(std::log(g[i].value));
        double rel = g[i].std_error > 0 ? g[i].std_error / g[i].value : 1e-6;
        w.push_back(1.0 / (rel * rel));
    }
    LineFit f = weighted_ols(x, y, w);
    if (f.slope >= 0) throw ConsistencyError("correlation_length_fit: non-decaying data");
    CorrelationLength out;
    out.fit = f;
    out.xi = -1.0 / f.slope;
    out.xi_se = f.slope_se / (f.slope * f.slope);
    return out;
}

}  // namespace spreadout
