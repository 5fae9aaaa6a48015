#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tlf {

// Index-based work sharing across jobs threads. The first exception wins and
// is rethrown on the caller after all workers drain.
template <typename Fn>
void parallel_for(size_t n, int jobs, Fn&& fn) {
    jobs = std::max(1, std::min(jobs, int(n == 0 ? 1 : n)));
    if (jobs == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    std::vector<std::thread> workers;
    workers.reserve(size_t(jobs));
    for (int t = 0; t < jobs; ++t) {
        workers.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace tlf
