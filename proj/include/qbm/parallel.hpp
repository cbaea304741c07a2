#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

namespace qbm {

int default_workers();

/// Splits [0, n_items) into fixed blocks of `block_size`, runs `produce` for
/// each block on a worker pool, and feeds results to `consume` strictly in
/// block order. Because the block structure and merge order are independent
/// of the worker count, reductions are bit-identical for any `workers`.
template <class Partial>
void ordered_block_reduce(std::size_t n_items, std::size_t block_size, int workers,
                          const std::function<Partial(std::size_t block, std::size_t i0,
                                                      std::size_t i1)>& produce,
                          const std::function<void(std::size_t block, Partial&&)>& consume) {
    if (n_items == 0) return;
    if (block_size == 0) block_size = 1;
    const std::size_t n_blocks = (n_items + block_size - 1) / block_size;
    int n_workers = workers > 0 ? workers : default_workers();
    if (static_cast<std::size_t>(n_workers) > n_blocks) n_workers = static_cast<int>(n_blocks);

    std::atomic<std::size_t> next_block{0};
    std::mutex merge_mutex;
    std::map<std::size_t, Partial> pending;
    std::size_t next_to_consume = 0;
    std::exception_ptr first_error;
    std::atomic<bool> abort{false};

    auto worker = [&]() {
        for (;;) {
            if (abort.load(std::memory_order_relaxed)) return;
            const std::size_t b = next_block.fetch_add(1);
            if (b >= n_blocks) return;
            const std::size_t i0 = b * block_size;
            const std::size_t i1 = std::min(n_items, i0 + block_size);
            try {
                Partial part = produce(b, i0, i1);
                std::lock_guard<std::mutex> lock(merge_mutex);
                pending.emplace(b, std::move(part));
                while (!pending.empty() && pending.begin()->first == next_to_consume) {
                    consume(next_to_consume, std::move(pending.begin()->second));
                    pending.erase(pending.begin());
                    ++next_to_consume;
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(merge_mutex);
                if (!first_error) first_error = std::current_exception();
                abort.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qbm
