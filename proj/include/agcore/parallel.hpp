#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace agcore {

// Runs fn(i) for i in [0, count). Indices are claimed through a shared
// counter, so callers must write results into preallocated per-index slots;
// that keeps output identical at any thread count. thread_count <= 0 means
// the hardware default. The first exception aborts the pool and is rethrown.
inline void parallel_for(long long count, int thread_count,
                         const std::function<void(long long)>& fn) {
    if (count <= 0) return;
    if (thread_count <= 0) {
        unsigned hw = std::thread::hardware_concurrency();
        thread_count = hw > 0 ? static_cast<int>(hw) : 1;
    }
    if (static_cast<long long>(thread_count) > count) thread_count = static_cast<int>(count);

    if (thread_count == 1) {
        for (long long i = 0; i < count; ++i) fn(i);
        return;
    }

    std::atomic<long long> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
        for (;;) {
            long long i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace agcore
