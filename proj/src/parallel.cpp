#include "fastescape/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fastescape {

int worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FASTESCAPE_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
            // fall through to hardware default
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn, int workers) {
    if (n == 0) return;
    const int w = worker_count(workers);
    if (w <= 1 || n == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    // Blocks of work from a shared counter: scheduling order varies between
    // runs, but each index computes the same thing into its own slot.
    const size_t block = std::max<size_t>(1, n / (static_cast<size_t>(w) * 16));
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(w));
    std::exception_ptr first_error = nullptr;
    std::atomic<bool> failed{false};
    std::mutex err_mutex;

    for (int t = 0; t < w; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const size_t start = next.fetch_add(block);
                if (start >= n || failed.load(std::memory_order_relaxed)) return;
                const size_t end = std::min(n, start + block);
                for (size_t i = start; i < end; ++i) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard<std::mutex> lk(err_mutex);
                        if (!first_error) first_error = std::current_exception();
                        failed.store(true, std::memory_order_relaxed);
                        return;
                    }
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace fastescape
