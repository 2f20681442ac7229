#include "fpprop/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fpprop {

int max_threads() {
    static const int cached = [] {
        if (const char* env = std::getenv("FPPROP_THREADS")) {
            try {
                int v = std::stoi(env);
                if (v >= 1) return v;
            } catch (...) {
            }
        }
        unsigned hc = std::thread::hardware_concurrency();
        return hc == 0 ? 1 : static_cast<int>(hc);
    }();
    return cached;
}

void parallel_for(long begin, long end, const std::function<void(long, long)>& fn) {
    const long n = end - begin;
    if (n <= 0) return;
    const int workers = std::min<long>(max_threads(), n);
    if (workers <= 1 || n < 64) {
        fn(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const long chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const long lo = begin + w * chunk;
        const long hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                fn(lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fpprop
