#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace nonloc {

/// Worker count: hardware concurrency, capped by the NONLOC_THREADS
/// environment variable when set.
inline int thread_budget() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* s = std::getenv("NONLOC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(s, &end, 10);
        if (end != s && v > 0) hw = static_cast<int>(std::min<long>(v, hw));
    }
    return hw;
}

/// Static block partition of [0, n). Each index is written by exactly one
/// worker, so results are bitwise independent of the thread count.
template <class F>
void parallel_for(int n, F&& body) {
    constexpr int min_block = 2048;
    const int nt = std::min(thread_budget(), std::max(1, n / min_block));
    if (nt <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt));
    const int block = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        const int lo = t * block;
        const int hi = std::min(n, lo + block);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (int i = lo; i < hi; ++i) body(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

} // namespace nonloc
