#pragma once

#include <stdexcept>
#include <string>

namespace spreadout {

/// Caller misuse (dimension mismatch, invalid parameter). CLI exit code 2.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Instance too large for an exact method or a window/table. CLI exit code 3.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// MC estimator refused: censoring rate too high (operationally supercritical).
struct CensoringError : std::runtime_error {
    double rate;
    explicit CensoringError(double r)
        : std::runtime_error("censoring rate " + std::to_string(r) + " exceeds 1e-2; estimator refuses"),
          rate(r) {}
};

/// Internal consistency failure (normalization off, leakage audit failed).
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace spreadout
