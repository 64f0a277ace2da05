#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace mdne {

// Runs fn(begin, end) over contiguous chunks of [0, count). With threads <= 1,
// or too little work to split, runs inline on the caller's thread.
template <class Fn>
void parallel_for_chunks(std::size_t count, int threads, Fn&& fn, std::size_t min_chunk = 16) {
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || count < 2 * min_chunk) {
        fn(std::size_t{0}, count);
        return;
    }
    const std::size_t chunks = std::min(workers, count / min_chunk);
    const std::size_t step = (count + chunks - 1) / chunks;
    std::vector<std::jthread> pool;
    pool.reserve(chunks - 1);
    for (std::size_t c = 1; c < chunks; ++c) {
        const std::size_t begin = c * step;
        const std::size_t end = std::min(count, begin + step);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    fn(std::size_t{0}, std::min(count, step));
}

}  // namespace mdne
