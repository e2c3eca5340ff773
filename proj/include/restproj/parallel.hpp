#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace restproj {

inline unsigned effective_threads(unsigned requested, std::size_t tasks) {
    unsigned t = requested ? requested : std::thread::hardware_concurrency();
    if (t == 0) t = 1;
    if (t > tasks) t = static_cast<unsigned>(tasks ? tasks : 1);
    return t;
}

/// Static fan-out of `count` independent tasks. Each task writes only to
/// its own output slot, so results do not depend on the thread count.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
    threads = effective_threads(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += threads) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace restproj
