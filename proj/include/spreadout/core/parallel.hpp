#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "spreadout/core/rng.hpp"

namespace spreadout {

inline unsigned default_workers() {
    if (const char* env = std::getenv("SPREADOUT_WORKERS")) {
        int w = std::atoi(env);
        if (w >= 1) return static_cast<unsigned>(w);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

/// Deterministic parallel fan-out: sample s always uses substream
/// stream.child(s); samples are grouped into fixed blocks, workers pull
/// blocks from a queue, and partial accumulators are merged in block order.
/// The result is bit-identical for any worker count.
///
/// Acc: default-constructible, with merge(const Acc&).
/// Fn: (CounterRng&, Acc&) -> void, one sample.
template <class Acc, class Fn>
Acc parallel_mc(uint64_t n_samples, unsigned workers, RngStream stream, Fn fn) {
    constexpr uint64_t kBlock = 1024;
    const uint64_t n_blocks = (n_samples + kBlock - 1) / kBlock;
    std::vector<Acc> partial(static_cast<size_t>(n_blocks));
    std::atomic<uint64_t> next{0};

    auto work = [&] {
        for (;;) {
            uint64_t b = next.fetch_add(1);
            if (b >= n_blocks) break;
            Acc acc;
            uint64_t lo = b * kBlock, hi = std::min(n_samples, lo + kBlock);
            for (uint64_t s = lo; s < hi; ++s) {
                CounterRng rng(stream.child(s));
                fn(rng, acc);
            }
            partial[static_cast<size_t>(b)] = std::move(acc);
        }
    };

    if (workers <= 1 || n_blocks <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        unsigned nw = std::min<uint64_t>(workers, n_blocks);
        pool.reserve(nw);
        for (unsigned i = 0; i < nw; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    Acc total;
    for (auto& p : partial) total.merge(p);
    return total;
}

/// Plain scalar accumulator: sum, sum of squares, count, plus a censored
/// counter for right-censored cluster samples.
struct ScalarAcc {
    double sum = 0, sumsq = 0;
    uint64_t n = 0, censored = 0;
    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++n;
    }
    void merge(const ScalarAcc& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        n += o.n;
        censored += o.censored;
    }
};

}  // namespace spreadout
