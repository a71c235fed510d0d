#pragma once

#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace cbt {

// Static block partition of [0, n) over worker threads.  Each index is
// processed exactly once and workers never share output slots, so results are
// identical for any worker count.  threads <= 0 selects the hardware count.
inline void parallel_for(long n, int threads, const std::function<void(long)>& body) {
    if (n <= 0) return;
    int k = threads;
    if (k <= 0) k = static_cast<int>(std::thread::hardware_concurrency());
    if (k < 1) k = 1;
    if (k == 1 || n == 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    if (static_cast<long>(k) > n) k = static_cast<int>(n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(k));
    std::exception_ptr first_error = nullptr;
    std::mutex err_mu;
    for (int w = 0; w < k; ++w) {
        const long lo = n * w / k;
        const long hi = n * (w + 1) / k;
        pool.emplace_back([&, lo, hi]() {
            try {
                for (long i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace cbt
