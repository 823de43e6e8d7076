#pragma once

#include <cmath>
#include <vector>

#include "spreadout/core/errors.hpp"

namespace spreadout {

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double slope_se = 0;
};

/// Weighted ordinary least squares y = a + b x with inverse-variance weights.
/// The slope error is the usual OLS standard error under the given weights.
inline LineFit weighted_ols(const std::vector<double>& x, const std::vector<double>& y,
                            const std::vector<double>& w) {
    if (x.size() != y.size() || x.size() != w.size() || x.size() < 2)
        throw UsageError("weighted_ols: need >= 2 matching points");
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
        sxx += w[i] * x[i] * x[i];
        sxy += w[i] * x[i] * y[i];
    }
    double det = sw * sxx - sx * sx;
    if (det <= 0) throw UsageError("weighted_ols: degenerate design");
    LineFit f;
    f.slope = (sw * sxy - sx * sy) / det;
    f.intercept = (sxx * sy - sx * sxy) / det;
    // residual-scaled slope SE
    double chi2 = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - f.intercept - f.slope * x[i];
        chi2 += w[i] * r * r;
    }
    double dof = static_cast<double>(x.size()) - 2.0;
    double scale = dof > 0 ? chi2 / dof : 1.0;
    f.slope_se = std::sqrt(scale * sw / det);
    return f;
}

/// Log-log fit: slope of log(y) vs log(x); weights from relative errors when
/// provided (se_y[i] is the standard error of y[i]).
inline LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>* se_y = nullptr) {
    std::vector<double> lx, ly, w;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0 || y[i] <= 0) throw UsageError("loglog_fit: nonpositive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
        if (se_y != nullptr && (*se_y)[i] > 0) {
            double rel = (*se_y)[i] / y[i];
            w.push_back(1.0 / (rel * rel));
        } else {
            w.push_back(1.0);
        }
    }
    return weighted_ols(lx, ly, w);
}

}  // namespace spreadout
