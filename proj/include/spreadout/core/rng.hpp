#pragma once

#include <cmath>
#include <cstdint>

#include "spreadout/core/point.hpp"

namespace spreadout {

/// Counter-based stream: output i of stream k is mix64(k + (i+1)*gamma).
/// Substream derivation is a pure function of (key, index), so the
/// experiment -> point -> sample hierarchy is reproducible and
/// independent of scheduling.
struct RngStream {
    uint64_t key = 0;

    RngStream child(uint64_t index) const {
        return RngStream{mix64(key ^ (0x632be59bd9b4e019ULL + index * 0x9e3779b97f4a7c15ULL))};
    }
};

class CounterRng {
  public:
    explicit CounterRng(RngStream s) : key_(s.key) {}
    explicit CounterRng(uint64_t key) : key_(key) {}

    uint64_t next_u64() { return mix64(key_ + (++ctr_) * 0x9e3779b97f4a7c15ULL); }

    uint64_t key() const { return key_; }

    /// Uniform in [0,1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_unit() < p; }

    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return next_u64() % n; }

    /// Uniform integer in [lo, hi] inclusive.
    int64_t range(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
    }

    /// Number of failures before the first success of a Bernoulli(p) sequence.
    /// Used to jump over closed edges in sparse neighborhood sampling.
    uint64_t geometric_failures(double p) {
        if (p >= 1.0) return 0;
        double u = next_unit();
        // 1-u in (0,1]; failures = floor(log(1-u)/log(1-p))
        double g = std::floor(std::log1p(-u) / std::log1p(-p));
        if (g < 0) g = 0;
        if (g > 9e18) g = 9e18;
        return static_cast<uint64_t>(g);
    }

  private:
    uint64_t key_;
    uint64_t ctr_ = 0;
};

}  // namespace spreadout
