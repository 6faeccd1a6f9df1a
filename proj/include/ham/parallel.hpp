#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace ham {

// Worker count used by every parallel loop; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(begin, end, block_id) over fixed blocks of [0, n). Block
// boundaries depend only on n and block_size, never on the worker count,
// so per-block partial results can be reduced in a fixed order.
template <class Body>
void for_blocks(std::size_t n, std::size_t block_size, Body&& body) {
    if (n == 0) return;
    const std::size_t nblocks = (n + block_size - 1) / block_size;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), nblocks));
    auto run = [&](unsigned w) {
        for (std::size_t b = w; b < nblocks; b += workers)
            body(b * block_size, std::min(n, (b + 1) * block_size), b);
    };
    if (workers <= 1) {
        run(0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
}

inline std::size_t block_count(std::size_t n, std::size_t block_size) {
    return (n + block_size - 1) / block_size;
}

}  // namespace ham
