#include "gsp/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gsp {

int thread_budget() {
    int fallback = static_cast<int>(std::thread::hardware_concurrency());
    if (fallback < 1) {
        fallback = 1;
    }
    const char* env = std::getenv("GSP_LAB_THREADS");
    if (env == nullptr || *env == '\0') {
        return fallback;
    }
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || v < 0) {
        return fallback;
    }
    return v == 0 ? fallback : static_cast<int>(std::min<long>(v, 256));
}

void parallel_for(long n, const std::function<void(long)>& fn) {
    if (n <= 0) {
        return;
    }
    int threads = std::min<long>(thread_budget(), n);
    if (threads <= 1) {
        for (long i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    long chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        long lo = t * chunk;
        long hi = std::min(n, lo + chunk);
        if (lo >= hi) {
            break;
        }
        pool.emplace_back([&, lo, hi] {
            try {
                for (long i = lo; i < hi; ++i) {
                    fn(i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

}  // namespace gsp
