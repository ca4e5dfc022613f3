#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace freshcost::detail {

inline unsigned resolve_threads(unsigned requested, std::size_t work_items) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(work_items, 1)));
}

// Calls fn(begin, end, worker) on contiguous chunks of [0, count). The first
// exception thrown by any worker is rethrown after all workers join.
template <class Fn>
void parallel_chunks(std::size_t count, unsigned threads, Fn&& fn) {
    const unsigned workers = resolve_threads(threads, count);
    if (workers <= 1) {
        if (count) fn(std::size_t{0}, count, 0u);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const std::size_t step = (count + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = std::min(count, w * step);
            const std::size_t end = std::min(count, begin + step);
            pool.emplace_back([&, begin, end, w] {
                try {
                    if (begin < end) fn(begin, end, w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace freshcost::detail
