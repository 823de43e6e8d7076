#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "spreadout/core/errors.hpp"
#include "spreadout/estimators/fit.hpp"
#include "spreadout/oracle/verify.hpp"

namespace spreadout {

/// Radial profile of the extremal convolution input on Λ_R:
/// f(x) = 1{x=0} + (C/L^d) (L / (L ∨ |x|))^{d-2}.
inline std::vector<double> extremal_profile(int d, int L, int R, double C) {
    std::vector<double> h(static_cast<size_t>(R) + 1);
    for (int r = 0; r <= R; ++r) {
        double denom = std::max(L, r);
        h[static_cast<size_t>(r)] =
            (C / std::pow(double(L), d)) * std::pow(double(L) / denom, d - 2) + (r == 0 ? 1.0 : 0.0);
    }
    return h;
}

namespace detail {

/// |{y : |y|_inf <= r1, |x - y|_inf <= r2}| for x on the first axis at
/// distance n: product over axes of interval-overlap lengths.
inline double box_overlap_count(int d, int r1, int r2, int n) {
    if (r1 < 0 || r2 < 0) return 0.0;
    auto axis_overlap = [&](int shift) {
        int lo = std::max(-r1, shift - r2);
        int hi = std::min(r1, shift + r2);
        return hi >= lo ? double(hi - lo + 1) : 0.0;
    };
    double first = axis_overlap(n);
    if (first == 0) return 0.0;
    double rest = axis_overlap(0);
    return first * std::pow(rest, d - 1);
}

/// |{y : |y| = r1, |x - y| = r2}| by inclusion-exclusion over the nested
/// boxes; avoids any summation over the d-dimensional window.
inline double shell_pair_count(int d, int r1, int r2, int n) {
    return box_overlap_count(d, r1, r2, n) - box_overlap_count(d, r1 - 1, r2, n) -
           box_overlap_count(d, r1, r2 - 1, n) + box_overlap_count(d, r1 - 1, r2 - 1, n);
}

}  // namespace detail

/// (f*f)(n e1) with f the radial profile supported on Λ_R, computed from
/// shell pair counts in O(R^2) per point.
inline double radial_self_convolution(int d, const std::vector<double>& h, int n) {
    const int R = static_cast<int>(h.size()) - 1;
    double total = 0;
    for (int r1 = 0; r1 <= R; ++r1) {
        if (h[static_cast<size_t>(r1)] == 0) continue;
        for (int r2 = 0; r2 <= R; ++r2) {
            double cnt = detail::shell_pair_count(d, r1, r2, n);
            if (cnt > 0) total += cnt * h[static_cast<size_t>(r1)] * h[static_cast<size_t>(r2)];
        }
    }
    return total;
}

struct ConvolutionReport {
    double A_small = 0;  // fitted constant at window R
    double A_large = 0;  // fitted constant at window 2R
    InequalityReport stability;  // lhs = worst ratio, rhs = 1.2
    std::vector<int> ray;        // axis distances used in the fit
    std::vector<double> conv_small;
};

/// Fits the smallest A with (f*f)(x) <= A (1{x=0} + L^{-4} (L ∨ |x|)^{-(d-4)})
/// along the first axis, at windows R and 2R; the check passes when the two
/// fitted constants agree within 20%.
inline ConvolutionReport verify_convolution(int d, int L, int R, double C) {
    if (d <= 4) throw UsageError("verify_convolution: requires d > 4");
    if (R < 2 * L) throw UsageError("verify_convolution: window too small");
    if (2.0 * R + 1.0 > 4096) throw CapacityError("verify_convolution: window too large");

    auto fitted_A = [&](int window, std::vector<int>* ray_out, std::vector<double>* conv_out) {
        auto h = extremal_profile(d, L, window, C);
        double A = 0;
        for (int n = 0; n <= window; n = (n == 0 ? 1 : n * 2)) {
            double conv = radial_self_convolution(d, h, n);
            double shape = (n == 0 ? 1.0 : 0.0) +
                           std::pow(1.0 / double(L), 4) *
                               std::pow(1.0 / double(std::max(L, n)), d - 4);
            A = std::max(A, conv / shape);
            if (ray_out) ray_out->push_back(n);
            if (conv_out) conv_out->push_back(conv);
        }
        return A;
    };

    ConvolutionReport rep;
    rep.A_small = fitted_A(R, &rep.ray, &rep.conv_small);
    rep.A_large = fitted_A(2 * R, nullptr, nullptr);
    double ratio = std::max(rep.A_large / rep.A_small, rep.A_small / rep.A_large);
    rep.stability = {"convolution d=" + std::to_string(d) + " L=" + std::to_string(L) +
                         " R=" + std::to_string(R),
                     ratio, 1.2};
    return rep;
}

/// Log-log slope of (f*f)(n e1) over an axis range (exponent diagnostic;
/// the conclusion display predicts -(d-4)).
inline LineFit convolution_axis_slope(int d, int L, int R, double C, int n_lo, int n_hi) {
    auto h = extremal_profile(d, L, R, C);
    std::vector<double> xs, ys;
    for (int n = n_lo; n <= n_hi; n *= 2) {
        xs.push_back(double(n));
        ys.push_back(radial_self_convolution(d, h, n));
    }
    return loglog_fit(xs, ys);
}

}  // namespace spreadout
