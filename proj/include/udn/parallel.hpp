#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace udn
{

/*!
 * Run fn(i) for i in [0, n) on up to `workers` threads.
 *
 * Indices are split into contiguous blocks. Callers write results into
 * per-index slots, so output never depends on the worker count. The first
 * exception thrown by any worker is rethrown on the calling thread.
 */
template<class F>
void parallel_for(std::size_t n, int workers, F&& fn)
{
    std::size_t const nthreads = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::max(workers, 1)));
    if (nthreads <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }

    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t)
    {
        std::size_t const begin = n * t / nthreads;
        std::size_t const end = n * (t + 1) / nthreads;
        pool.emplace_back([&, begin, end] {
            try
            {
                for (std::size_t i = begin; i < end; ++i)
                    fn(i);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

}  // namespace udn
