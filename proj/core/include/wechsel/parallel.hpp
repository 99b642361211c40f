#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace wechsel {

// Clamp a requested worker count; <= 0 means "use the hardware".
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static split of [begin, end) into contiguous chunks, one per worker.
// Workers own disjoint output ranges, so results never depend on the
// thread count. The first exception thrown by any worker is rethrown.
template <typename Fn>
void parallel_chunks(std::size_t begin, std::size_t end, int threads, Fn&& fn) {
    const std::size_t n = end > begin ? end - begin : 0;
    if (n == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(threads)), n);
    if (workers <= 1) {
        fn(begin, end);
        return;
    }

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;

    auto run = [&](std::size_t w) {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) return;
        try {
            fn(lo, hi);
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };

    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run, w);
    run(0);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace wechsel
