#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace ibdwaves::cli {

// Evaluates fn(0..count-1) on up to `threads` workers; results keep index order.
template <class Fn>
auto parallel_map(std::size_t count, unsigned threads, Fn fn) {
    using R = decltype(fn(std::size_t{}));
    std::vector<R> out(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < count; k = next++) out[k] = fn(k);
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    return out;
}

}  // namespace ibdwaves::cli
