// parallel.hpp — deterministic block-partitioned parallel loop
#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace declab {

// runs fn(i) for i in [0, n); each index writes only its own slot, so results
// are identical to the serial order
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t hw = std::thread::hardware_concurrency();
    const std::size_t workers = std::min(n, hw == 0 ? std::size_t{1} : static_cast<std::size_t>(hw));
    if (workers <= 1 || n < 4) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace declab
