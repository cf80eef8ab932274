#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace degensolve {

namespace detail {
inline std::atomic<int> g_threads{1};
}

/// Process-wide worker count used by the sweep helpers (default 1).
inline void set_threads(int n) { detail::g_threads.store(std::max(1, n)); }
inline int threads() { return detail::g_threads.load(); }

/// Runs fn(begin, end) over a static partition of [0, n). With the
/// single-thread setting this degenerates to one call on the calling thread.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const int nt = threads();
    if (nt <= 1 || n < 2) {
        fn(0, n);
        return;
    }
    const std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(nt), n);
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t b = n * c / chunks;
        const std::size_t e = n * (c + 1) / chunks;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& t : pool) t.join();
}

/// Deterministic map-reduce: chunk results land in index order, the reduction
/// runs sequentially afterwards, so the outcome is independent of the worker
/// count and of scheduling.
template <typename R, typename Map, typename Reduce>
R ordered_reduce(std::size_t n, R init, Map map_chunk, Reduce reduce) {
    const int nt = threads();
    const std::size_t chunks = (nt <= 1 || n < 2) ? 1 : std::min<std::size_t>(static_cast<std::size_t>(nt), n);
    std::vector<R> partial(chunks, init);
    if (chunks == 1) {
        partial[0] = map_chunk(std::size_t{0}, n, init);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(chunks);
        for (std::size_t c = 0; c < chunks; ++c) {
            const std::size_t b = n * c / chunks;
            const std::size_t e = n * (c + 1) / chunks;
            pool.emplace_back([&, c, b, e] { partial[c] = map_chunk(b, e, init); });
        }
        for (auto& t : pool) t.join();
    }
    R acc = init;
    for (const R& p : partial) acc = reduce(acc, p);
    return acc;
}

}  // namespace degensolve
