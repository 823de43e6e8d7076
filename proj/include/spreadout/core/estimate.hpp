#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace spreadout {

/// Universal MC result carrier. std_error == 0 marks an exact value.
struct Estimate {
    double value = 0;
    double std_error = 0;
    uint64_t n_samples = 0;
    std::string truncation;  // optional window descriptor
    double censored_rate = 0;

    static Estimate exact(double v) { return Estimate{v, 0.0, 0, {}, 0.0}; }
};

/// Mean and standard error from (sum, sum of squares, n).
inline Estimate mean_estimate(double sum, double sumsq, uint64_t n) {
    Estimate e;
    e.n_samples = n;
    if (n == 0) return e;
    double mean = sum / static_cast<double>(n);
    e.value = mean;
    if (n > 1) {
        double var = (sumsq - sum * mean) / static_cast<double>(n - 1);
        if (var < 0) var = 0;
        e.std_error = std::sqrt(var / static_cast<double>(n));
    }
    return e;
}

}  // namespace spreadout
