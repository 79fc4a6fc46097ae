#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace curator {

/// Runs fn(i) for every i in [0, n) across up to `workers` threads. Work is
/// split into contiguous blocks, so results written by index are independent
/// of scheduling. The first exception thrown by any worker is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    workers = std::max(1u, workers);
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t nthreads = std::min<std::size_t>(workers, n);
    const std::size_t block = (n + nthreads - 1) / nthreads;
    std::exception_ptr failure;
    std::mutex failure_mu;
    {
        std::vector<std::jthread> threads;
        threads.reserve(nthreads);
        for (std::size_t t = 0; t < nthreads; ++t) {
            const std::size_t begin = t * block;
            const std::size_t end = std::min(n, begin + block);
            if (begin >= end) break;
            threads.emplace_back([&, begin, end] {
                try {
                    for (std::size_t i = begin; i < end; ++i) fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace curator
