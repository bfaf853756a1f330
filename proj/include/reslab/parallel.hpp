#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace reslab {

// Worker count from RESLAB_THREADS; 0 or unset means hardware concurrency.
inline int thread_count() {
    const char* env = std::getenv("RESLAB_THREADS");
    long n = 0;
    if (env && *env) {
        char* end = nullptr;
        n = std::strtol(env, &end, 10);
        if (end == env || n < 0) n = 0;
    }
    if (n == 0) n = static_cast<long>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    return static_cast<int>(n);
}

// Deterministic parallel map: indices are split into contiguous chunks, each
// index writes only its own slot in caller-owned storage, so results do not
// depend on the worker count. Exceptions are rethrown (first index order).
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    int workers = thread_count();
    if (workers == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    if (static_cast<std::size_t>(workers) > n) workers = static_cast<int>(n);
    std::vector<std::exception_ptr> errs(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) {
                try {
                    body(i);
                } catch (...) {
                    errs[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

} // namespace reslab
