#pragma once

#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace bhchain {

/// Worker count resolution: explicit value > 0 wins, otherwise the
/// BHCHAIN_WORKERS environment variable, otherwise hardware concurrency.
inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("BHCHAIN_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Runs fn(i) for i in [0, n) on `workers` threads with a static contiguous
/// partition. Tasks write results by index only, so outputs are identical for
/// any worker count. The first exception (by task index) is rethrown.
inline void parallel_for_static(int n, int workers,
                                const std::function<void(int)>& fn) {
    if (n <= 0) return;
    workers = std::min(std::max(workers, 1), n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errs(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int base = n / workers, rem = n % workers;
    int start = 0;
    for (int w = 0; w < workers; ++w) {
        const int len = base + (w < rem ? 1 : 0);
        const int lo = start, hi = start + len;
        start = hi;
        pool.emplace_back([&, lo, hi]() {
            for (int i = lo; i < hi; ++i) {
                try {
                    fn(i);
                } catch (...) {
                    errs[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (int i = 0; i < n; ++i)
        if (errs[i]) std::rethrow_exception(errs[i]);
}

}  // namespace bhchain
