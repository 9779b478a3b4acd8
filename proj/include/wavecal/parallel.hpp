// Deterministic parallel map: results land by index, so the outcome is
// independent of thread count and scheduling.
#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace wavecal {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Run fn(i) for i in [0, n); fn must only write state owned by index i.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    const int nt = resolve_threads(threads);
    if (nt <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&, t]() {
            for (std::size_t i = static_cast<std::size_t>(t); i < n; i += static_cast<std::size_t>(nt))
                fn(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace wavecal
