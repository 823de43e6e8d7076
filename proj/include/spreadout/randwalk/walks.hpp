#pragma once

#include <cmath>
#include <variant>
#include <vector>

#include "spreadout/core/parallel.hpp"
#include "spreadout/core/estimate.hpp"
#include "spreadout/randwalk/step.hpp"

namespace spreadout {

/// Stopping rules on trajectories. Index conventions follow the sources of
/// each rule: half-space exits are checked from step 1 on, box exits and hits
/// from step 0 (a start already outside the box stops at time 0).
struct ExitHalfSpace {
    int n;  // stop when x1 < -n
};
struct ExitBox {
    int n;  // stop when linf(x) > n
};
struct HitPoint {
    Point x;
};
struct HitLevel {
    int k;  // stop when x1 >= k
};
using StoppingSpec = std::variant<ExitHalfSpace, ExitBox, HitPoint, HitLevel>;

inline bool stop_matches(const StoppingSpec& s, const Point& x, uint64_t k) {
    return std::visit(
        [&](const auto& v) -> bool {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ExitHalfSpace>)
                return k >= 1 && x[0] < -v.n;
            else if constexpr (std::is_same_v<T, ExitBox>)
                return x.linf() > v.n;
            else if constexpr (std::is_same_v<T, HitPoint>)
                return x == v.x;
            else
                return x[0] >= v.k;
        },
        s);
}

struct WalkResult {
    bool stopped = false;
    uint64_t index = 0;  // stopping index when stopped, horizon otherwise
    Point final;
};

/// Simulates the walk until the stopping rule fires or the horizon runs out.
inline WalkResult walk_sample(const StepDistribution& step, const Point& start,
                              const StoppingSpec& stop, uint64_t horizon, CounterRng& rng) {
    if (horizon < 1) throw UsageError("walk_sample: horizon >= 1");
    Point x = start;
    if (stop_matches(stop, x, 0)) return {true, 0, x};
    for (uint64_t k = 1; k <= horizon; ++k) {
        x = x + step.sample(rng);
        if (stop_matches(stop, x, k)) return {true, k, x};
    }
    return {false, horizon, x};
}

// ---------------------------------------------------------------------------
// Half-space Green functions: expected visits to x before exiting {x1 >= 0}.
// ---------------------------------------------------------------------------

struct GreenResult {
    double value = 0;
    double leakage = 0;  // absorbed-outside-window probability mass
    uint64_t horizon = 0;
};

/// Dense finite-horizon DP for the uniform spread-out walk, d <= 3. State
/// space: {0 <= x1 <= window, |x_j| <= window for j > 1}. Mass stepping below
/// x1 = 0 is legitimately killed; mass crossing any other window face is
/// absorbed and audited as leakage — the method refuses when that leakage
/// exceeds 1e-6, since the window would then bias the value.
///
/// One time step of the kernel is computed from the full-box average by
/// K = ((lambda*+1) U - id) / lambda*, with U applied as a separable
/// sliding-window pass per axis; cost O(horizon * cells * d).
inline GreenResult halfspace_green_dp(int d, int L, const Point& x, uint64_t horizon, int window) {
    if (d < 1 || d > 3) throw UsageError("halfspace_green_dp: d <= 3 only");
    if (x.dim != d) throw UsageError("halfspace_green_dp: dimension mismatch");
    if (x[0] < 0) return {0.0, 0.0, horizon};  // outside the half-space
    if (x.linf() > window) throw UsageError("halfspace_green_dp: target outside window");

    std::vector<int> extent(static_cast<size_t>(d));
    extent[0] = window + 1;
    for (int j = 1; j < d; ++j) extent[static_cast<size_t>(j)] = 2 * window + 1;
    std::vector<size_t> stride(static_cast<size_t>(d), 1);
    for (int j = d - 2; j >= 0; --j)
        stride[static_cast<size_t>(j)] = stride[static_cast<size_t>(j + 1)] *
                                         static_cast<size_t>(extent[static_cast<size_t>(j + 1)]);
    size_t cells = stride[0] * static_cast<size_t>(extent[0]);

    auto cell_of = [&](const Point& p) {
        size_t idx = static_cast<size_t>(p[0]);  // axis 0 offset: [0, window]
        for (int j = 1; j < d; ++j) idx = idx * static_cast<size_t>(extent[static_cast<size_t>(j)]) +
                                          static_cast<size_t>(p[j] + window);
        return idx;
    };

    std::vector<double> cur(cells, 0.0), prev;
    cur[cell_of(Point::zero(d))] = 1.0;
    const size_t target = cell_of(x);
    double green = cur[target];

    const double lam = SpreadOutModel::lambda_star_count(d, L);
    const double box = lam + 1.0;
    double leaked = 0;

    std::vector<double> line, pre, out;

    for (uint64_t t = 1; t <= horizon; ++t) {
        prev = cur;
        for (int ax = 0; ax < d; ++ax) {
            const int n = extent[static_cast<size_t>(ax)];
            const size_t st = stride[static_cast<size_t>(ax)];
            const size_t n_lines = cells / static_cast<size_t>(n);
            line.assign(static_cast<size_t>(n), 0.0);
            pre.assign(static_cast<size_t>(n), 0.0);
            out.assign(static_cast<size_t>(n), 0.0);
            const double inv = 1.0 / (2.0 * L + 1.0);
            for (size_t li = 0; li < n_lines; ++li) {
                size_t base = 0, rem = li;
                for (int j = d - 1; j >= 0; --j) {
                    if (j == ax) continue;
                    size_t e = static_cast<size_t>(extent[static_cast<size_t>(j)]);
                    base += (rem % e) * stride[static_cast<size_t>(j)];
                    rem /= e;
                }
                double total_before = 0;
                for (int i = 0; i < n; ++i) {
                    line[static_cast<size_t>(i)] = cur[base + st * static_cast<size_t>(i)];
                    total_before += line[static_cast<size_t>(i)];
                }
                double run = 0;
                for (int i = 0; i < n; ++i) {
                    run += line[static_cast<size_t>(i)];
                    pre[static_cast<size_t>(i)] = run;
                }
                double total_after = 0;
                for (int i = 0; i < n; ++i) {
                    int hi = std::min(n - 1, i + L);
                    int lo = i - L;
                    double s = pre[static_cast<size_t>(hi)] -
                               (lo > 0 ? pre[static_cast<size_t>(lo - 1)] : 0.0);
                    out[static_cast<size_t>(i)] = s * inv;
                    total_after += out[static_cast<size_t>(i)];
                }
                double loss = total_before - total_after;
                if (ax == 0) {
                    // the low-end loss is killing at x1 < 0, only the
                    // high-end overflow is leakage
                    double high_loss = 0;
                    for (int i = std::max(0, n - L); i < n; ++i)
                        high_loss +=
                            line[static_cast<size_t>(i)] * (i + L - (n - 1)) * inv;
                    leaked += high_loss * box / lam;
                    (void)loss;
                } else {
                    leaked += loss * box / lam;
                }
                for (int i = 0; i < n; ++i)
                    cur[base + st * static_cast<size_t>(i)] = out[static_cast<size_t>(i)];
            }
        }
        for (size_t i = 0; i < cells; ++i) cur[i] = (box * cur[i] - prev[i]) / lam;
        green += cur[target];
    }
    if (leaked > 1e-6)
        throw CapacityError("halfspace_green_dp: window too small, leakage " +
                            std::to_string(leaked));
    return {green, leaked, horizon};
}

/// Monte-Carlo estimate of the same finite-horizon quantity: visit counts to
/// x before exiting the half-space, horizon-truncated, uniform spread steps.
inline Estimate halfspace_green_mc(int d, int L, const Point& x, uint64_t horizon,
                                   uint64_t n_samples, const RngStream& stream) {
    if (x.dim != d) throw UsageError("halfspace_green_mc: dimension mismatch");
    StepDistribution step = StepDistribution::uniform_spread(d, L);
    unsigned workers = default_workers();
    ScalarAcc acc =
        parallel_mc<ScalarAcc>(n_samples, workers, stream, [&](CounterRng& rng, ScalarAcc& a) {
            Point pos = Point::zero(d);
            double visits = (pos == x) ? 1.0 : 0.0;
            for (uint64_t t = 1; t <= horizon; ++t) {
                pos = pos + step.sample(rng);
                if (pos[0] < 0) break;
                if (pos == x) visits += 1.0;
            }
            a.add(visits);
        });
    return mean_estimate(acc.sum, acc.sumsq, acc.n);
}

/// Fast axis-profile variant for the decay fit: G(n e1) for n = 0..n_max.
/// Exploits an exact time-change identity: the spread-out walk is the
/// full-box product walk with its zero-steps removed, so the half-space
/// Green function factorizes into independent 1-d box walks,
///   G(x) = lambda*/(lambda*+1) * sum_t f(t, x1) * g(t, 0)^{d-1},
/// with f the killed 1-d DP on [0, W] and g the free 1-d DP. Horizon
/// truncation applies; window leakage is audited as in the dense DP.
inline std::vector<GreenResult> halfspace_green_axis(int d, int L, int n_max, uint64_t horizon) {
    if (n_max < 0) throw UsageError("halfspace_green_axis: n_max >= 0");
    const double lam = SpreadOutModel::lambda_star_count(d, L);
    const double sigma_axis = std::sqrt(L * (L + 1) / 3.0);
    const int spread = static_cast<int>(std::ceil(7.0 * sigma_axis * std::sqrt(double(horizon)))) + L;
    const int W1 = n_max + spread;
    const int Wt = spread;

    // killed 1-d walk on [0, W1], per-axis uniform step on [-L, L]
    std::vector<double> f(static_cast<size_t>(W1 + 1), 0.0), f2 = f;
    // free 1-d walk on [-Wt, Wt]
    std::vector<double> g(static_cast<size_t>(2 * Wt + 1), 0.0), g2 = g;
    f[0] = 1.0;
    g[static_cast<size_t>(Wt)] = 1.0;
    double leak = 0;
    const double inv = 1.0 / (2.0 * L + 1.0);

    std::vector<double> acc(static_cast<size_t>(n_max + 1), 0.0);
    for (int n = 0; n <= n_max; ++n) acc[static_cast<size_t>(n)] = f[static_cast<size_t>(n)] *
                                                                   std::pow(g[static_cast<size_t>(Wt)], d - 1);

    auto box_pass = [&](std::vector<double>& from, std::vector<double>& to, bool killed_low) {
        const int n = static_cast<int>(from.size());
        static thread_local std::vector<double> pre;
        pre.assign(static_cast<size_t>(n), 0.0);
        double run = 0;
        for (int i = 0; i < n; ++i) {
            run += from[static_cast<size_t>(i)];
            pre[static_cast<size_t>(i)] = run;
        }
        double before = run, after = 0;
        for (int i = 0; i < n; ++i) {
            int hi = std::min(n - 1, i + L);
            int lo = i - L;
            to[static_cast<size_t>(i)] =
                (pre[static_cast<size_t>(hi)] - (lo > 0 ? pre[static_cast<size_t>(lo - 1)] : 0.0)) * inv;
            after += to[static_cast<size_t>(i)];
        }
        double loss = before - after;
        if (killed_low) {
            double high_loss = 0;
            for (int i = std::max(0, n - L); i < n; ++i)
                high_loss += from[static_cast<size_t>(i)] * (i + L - (n - 1)) * inv;
            return high_loss;  // low end is killing, not leakage
        }
        return loss;
    };

    for (uint64_t t = 1; t <= horizon; ++t) {
        leak += box_pass(f, f2, true);
        leak += box_pass(g, g2, false);
        f.swap(f2);
        g.swap(g2);
        double gc = std::pow(g[static_cast<size_t>(Wt)], d - 1);
        for (int n = 0; n <= n_max; ++n) acc[static_cast<size_t>(n)] += f[static_cast<size_t>(n)] * gc;
    }
    if (leak > 1e-6)
        throw CapacityError("halfspace_green_axis: window leakage " + std::to_string(leak));

    std::vector<GreenResult> out;
    for (int n = 0; n <= n_max; ++n)
        out.push_back({acc[static_cast<size_t>(n)] * lam / (lam + 1.0), leak, horizon});
    return out;
}

// ---------------------------------------------------------------------------
// First-coordinate observables: gambler's ruin and half-space exit.
// ---------------------------------------------------------------------------

/// 1-d projected nonzero step of the uniform spread-out walk: uniform on
/// [-L, L] \ {0}. Zero-moves of the projection are skipped entirely; they
/// change neither hitting order nor exit side.
inline int projected_nonzero_step(int L, CounterRng& rng) {
    uint64_t r = rng.below(static_cast<uint64_t>(2 * L));
    int v = static_cast<int>(r) - L;
    return v >= 0 ? v + 1 : v;
}

/// P_0[ first coordinate reaches level k before dropping below 0 ].
inline Estimate gamblers_ruin(int L, int k, uint64_t n_trials, const RngStream& stream) {
    if (k < 1) throw UsageError("gamblers_ruin: k >= 1");
    unsigned workers = default_workers();
    ScalarAcc acc =
        parallel_mc<ScalarAcc>(n_trials, workers, stream, [&](CounterRng& rng, ScalarAcc& a) {
            int64_t pos = 0;
            for (;;) {
                pos += projected_nonzero_step(L, rng);
                if (pos >= k) {
                    a.add(1.0);
                    return;
                }
                if (pos < 0) {
                    a.add(0.0);
                    return;
                }
            }
        });
    return mean_estimate(acc.sum, acc.sumsq, acc.n);
}

/// P[tau_k < horizon]: the first coordinate drops below -k within the
/// horizon. Lazy steps of the projection are skipped by sampling the
/// geometric holding time, so the cost scales with the number of actual
/// moves, not the horizon.
inline Estimate exit_probability_finite(const SpreadOutModel& m, int k, uint64_t horizon,
                                        uint64_t n_trials, const RngStream& stream) {
    if (k < 0) throw UsageError("exit_probability_finite: k >= 0");
    // stay probability of the projected step
    double box_rest = std::pow(2.0 * m.L + 1.0, m.d - 1);
    double p_stay = (box_rest - 1.0) / static_cast<double>(m.lambda_star);
    unsigned workers = default_workers();
    ScalarAcc acc =
        parallel_mc<ScalarAcc>(n_trials, workers, stream, [&](CounterRng& rng, ScalarAcc& a) {
            int64_t pos = 0;
            uint64_t t = 0;
            for (;;) {
                // geometric holding time at the current level, then one move
                if (p_stay > 0) t += rng.geometric_failures(1.0 - p_stay);
                t += 1;
                if (t >= horizon) break;
                pos += projected_nonzero_step(m.L, rng);
                if (pos < -static_cast<int64_t>(k)) {
                    a.add(1.0);
                    return;
                }
            }
            a.add(0.0);
        });
    return mean_estimate(acc.sum, acc.sumsq, acc.n);
}

// ---------------------------------------------------------------------------
// Box exit times and Harnack ratios for shell-supported step laws.
// ---------------------------------------------------------------------------

/// E[tau_n], tau_n = inf{k >= 0 : X_k outside Λ_n}; a start outside the box
/// returns 0.
inline Estimate exit_time_box(const StepDistribution& step, int n, const Point& start,
                              uint64_t n_samples, const RngStream& stream,
                              uint64_t safety_horizon = 100000000) {
    unsigned workers = default_workers();
    ScalarAcc acc =
        parallel_mc<ScalarAcc>(n_samples, workers, stream, [&](CounterRng& rng, ScalarAcc& a) {
            Point x = start;
            if (x.linf() > n) {
                a.add(0.0);
                return;
            }
            uint64_t k = 0;
            while (k < safety_horizon) {
                x = x + step.sample(rng);
                ++k;
                if (x.linf() > n) break;
            }
            a.add(static_cast<double>(k));
        });
    return mean_estimate(acc.sum, acc.sumsq, acc.n);
}

/// Exact expected exit time for a 1-d tabulated step law on Λ_n, by solving
/// E(a) = 1 + sum_s mass(s) E(a+s) over the 2n+1 interior states (Gaussian
/// elimination; oracle for the MC version).
inline double exit_time_exact_1d(const StepDistribution& step, int n, int start) {
    if (step.d != 1 || step.kind != StepDistribution::Kind::Tabulated)
        throw UsageError("exit_time_exact_1d: 1-d tabulated laws only");
    if (std::abs(start) > n) return 0.0;
    const int s = 2 * n + 1;
    std::vector<std::vector<double>> A(static_cast<size_t>(s),
                                       std::vector<double>(static_cast<size_t>(s + 1), 0.0));
    for (int a = -n; a <= n; ++a) {
        size_t r = static_cast<size_t>(a + n);
        A[r][static_cast<size_t>(a + n)] = 1.0;
        A[r][static_cast<size_t>(s)] = 1.0;
        for (size_t i = 0; i < step.offsets.size(); ++i) {
            int b = a + step.offsets[i][0];
            if (std::abs(b) <= n) A[r][static_cast<size_t>(b + n)] -= step.mass[i];
        }
    }
    // plain Gaussian elimination with partial pivoting
    for (int col = 0; col < s; ++col) {
        int piv = col;
        for (int r = col + 1; r < s; ++r)
            if (std::fabs(A[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
                std::fabs(A[static_cast<size_t>(piv)][static_cast<size_t>(col)]))
                piv = r;
        std::swap(A[static_cast<size_t>(col)], A[static_cast<size_t>(piv)]);
        double d = A[static_cast<size_t>(col)][static_cast<size_t>(col)];
        if (std::fabs(d) < 1e-14) throw ConsistencyError("exit_time_exact_1d: singular system");
        for (int r = 0; r < s; ++r) {
            if (r == col) continue;
            double fac = A[static_cast<size_t>(r)][static_cast<size_t>(col)] / d;
            if (fac == 0) continue;
            for (int c = col; c <= s; ++c)
                A[static_cast<size_t>(r)][static_cast<size_t>(c)] -=
                    fac * A[static_cast<size_t>(col)][static_cast<size_t>(c)];
        }
    }
    return A[static_cast<size_t>(start + n)][static_cast<size_t>(s)] /
           A[static_cast<size_t>(start + n)][static_cast<size_t>(start + n)];
}

/// Empirical Harnack ratio: for boundary-patch indicator weights f (one per
/// exit face of Λ_{floor((1+alpha) n)}), estimate E_u[f(X_tau)] over a grid
/// of starts u in Λ_n and report the worst max/min ratio across patches.
struct HarnackReport {
    double worst_ratio = 1.0;
    double min_patch_mass = 1.0;  // smallest per-start patch probability seen
};

inline HarnackReport harnack_ratio(const StepDistribution& step, int n, double alpha,
                                   const std::vector<Point>& starts, uint64_t n_samples,
                                   const RngStream& stream) {
    if (starts.empty()) throw UsageError("harnack_ratio: need start points");
    const int big = static_cast<int>(std::floor((1.0 + alpha) * n));
    if (big <= n) throw UsageError("harnack_ratio: alpha too small");
    const int d = step.d;
    const size_t n_patch = 2 * static_cast<size_t>(d);
    unsigned workers = default_workers();

    // patch index of an exit point: dominant axis and sign
    auto patch_of = [&](const Point& x) {
        int best = 0;
        int32_t mag = 0;
        for (int j = 0; j < d; ++j) {
            int32_t a = std::abs(x[j]);
            if (a > mag) {
                mag = a;
                best = j;
            }
        }
        return static_cast<size_t>(2 * best + (x[best] > 0 ? 0 : 1));
    };

    std::vector<std::vector<double>> freq(starts.size(), std::vector<double>(n_patch, 0.0));
    for (size_t si = 0; si < starts.size(); ++si) {
        struct PatchAcc {
            std::vector<double> cnt;
            uint64_t n = 0;
            void merge(const PatchAcc& o) {
                if (cnt.size() < o.cnt.size()) cnt.resize(o.cnt.size(), 0.0);
                for (size_t i = 0; i < o.cnt.size(); ++i) cnt[i] += o.cnt[i];
                n += o.n;
            }
        };
        PatchAcc acc = parallel_mc<PatchAcc>(
            n_samples, workers, stream.child(si), [&](CounterRng& rng, PatchAcc& a) {
                if (a.cnt.size() < n_patch) a.cnt.resize(n_patch, 0.0);
                Point x = starts[si];
                while (x.linf() <= big) x = x + step.sample(rng);
                a.cnt[patch_of(x)] += 1.0;
                ++a.n;
            });
        for (size_t pi = 0; pi < n_patch; ++pi)
            freq[si][pi] = acc.cnt[pi] / static_cast<double>(acc.n);
    }

    HarnackReport rep;
    for (size_t pi = 0; pi < n_patch; ++pi) {
        double mn = 1.0, mx = 0.0;
        for (size_t si = 0; si < starts.size(); ++si) {
            mn = std::min(mn, freq[si][pi]);
            mx = std::max(mx, freq[si][pi]);
        }
        rep.min_patch_mass = std::min(rep.min_patch_mass, mn);
        if (mn > 0) rep.worst_ratio = std::max(rep.worst_ratio, mx / mn);
    }
    return rep;
}

}  // namespace spreadout
