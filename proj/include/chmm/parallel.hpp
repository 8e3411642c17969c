#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace chmm::detail {

/// Run fn(i) for i in [0,n) on up to n_threads workers. Work items must write
/// only to their own index slots; results are therefore identical to the
/// sequential order regardless of scheduling.
inline void parallel_for_index(int n, int n_threads, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    if (n_threads <= 0) {
        n_threads = static_cast<int>(std::thread::hardware_concurrency());
        if (n_threads <= 0) n_threads = 1;
    }
    n_threads = std::min(n_threads, n);
    if (n_threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) {
        pool.emplace_back([&, w]() {
            for (int i = w; i < n; i += n_threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace chmm::detail
