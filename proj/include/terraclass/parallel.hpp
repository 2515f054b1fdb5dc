#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace terraclass {

/// Pixels per reduction block. Partial sums are formed per block and combined
/// in block order, so floating-point results do not depend on worker count.
inline constexpr std::size_t kBlockSize = 4096;

inline std::size_t block_count(std::size_t n) { return (n + kBlockSize - 1) / kBlockSize; }

/// Calls fn(block, begin, end) for every block of [0, n). Blocks are dealt
/// round-robin to `workers` threads; fn must only write block-private state.
inline void for_each_block(std::size_t n, std::size_t workers,
                           const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    const std::size_t blocks = block_count(n);
    workers = std::max<std::size_t>(1, std::min(workers, blocks));
    auto run = [&](std::size_t w) {
        for (std::size_t blk = w; blk < blocks; blk += workers) {
            const std::size_t begin = blk * kBlockSize;
            fn(blk, begin, std::min(n, begin + kBlockSize));
        }
    };
    if (workers == 1) {
        run(0);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                run(w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace terraclass
