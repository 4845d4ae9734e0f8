#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace adaptest {

// Static-chunked parallel loop.  Each index writes only its own outputs,
// so results are identical for any worker count.  workers == 0 means
// hardware concurrency.
inline void parallel_for(std::size_t count, unsigned workers,
                         const std::function<void(std::size_t)>& fn) {
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    const unsigned w = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    std::vector<std::thread> pool;
    pool.reserve(w);
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (unsigned t = 0; t < w; ++t) {
        const std::size_t lo = count * t / w;
        const std::size_t hi = count * (t + 1) / w;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i)
                    fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mutex);
                if (!first_error)
                    first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace adaptest
