#pragma once
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace aword {

// Deterministic work splitting: the chunk partition depends only on the item
// count, never on the thread count, and callers merge per-chunk results in
// ascending chunk order. Thread count then cannot change any reduction order.
struct ChunkRange {
    std::size_t index, begin, end;
};

inline std::size_t chunk_count(std::size_t total, std::size_t chunk_size) {
    if (total == 0) return 0;
    return (total + chunk_size - 1) / chunk_size;
}

inline ChunkRange chunk_range(std::size_t chunk_index, std::size_t total,
                              std::size_t chunk_size) {
    const std::size_t begin = chunk_index * chunk_size;
    const std::size_t end = begin + chunk_size < total ? begin + chunk_size : total;
    return {chunk_index, begin, end};
}

// Runs fn once per chunk. fn must only write to chunk-owned state.
inline void parallel_chunks(int threads, std::size_t total, std::size_t chunk_size,
                            const std::function<void(const ChunkRange&)>& fn) {
    const std::size_t n_chunks = chunk_count(total, chunk_size);
    if (n_chunks == 0) return;
    if (threads <= 1 || n_chunks == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) fn(chunk_range(c, total, chunk_size));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            fn(chunk_range(c, total, chunk_size));
        }
    };
    const std::size_t n_workers =
        std::min<std::size_t>(static_cast<std::size_t>(threads), n_chunks);
    std::vector<std::thread> pool;
    pool.reserve(n_workers - 1);
    for (std::size_t t = 1; t < n_workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

} // namespace aword
