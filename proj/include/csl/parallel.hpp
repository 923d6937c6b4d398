#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace csl
{
    inline unsigned default_workers()
    {
        const unsigned n = std::thread::hardware_concurrency();
        return n == 0 ? 1u : n;
    }

    /// Calls fn(i) for i in [0, n) on up to `workers` threads, static contiguous chunks.
    /// fn must only write to state owned by index i; the first exception is rethrown.
    template <class Fn>
    void parallel_for(std::size_t n, unsigned workers, Fn &&fn)
    {
        workers = std::max(1u, workers);
        const std::size_t chunks = std::min<std::size_t>(workers, n);
        if (chunks <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }
        std::vector<std::exception_ptr> errors(chunks);
        std::vector<std::thread> threads;
        threads.reserve(chunks);
        for (std::size_t c = 0; c < chunks; ++c)
        {
            const std::size_t lo = n * c / chunks;
            const std::size_t hi = n * (c + 1) / chunks;
            threads.emplace_back([&, c, lo, hi] {
                try
                {
                    for (std::size_t i = lo; i < hi; ++i)
                        fn(i);
                }
                catch (...)
                {
                    errors[c] = std::current_exception();
                }
            });
        }
        for (auto &t : threads)
            t.join();
        for (auto &e : errors)
        {
            if (e)
                std::rethrow_exception(e);
        }
    }

    /// out[i] = fn(i), computed in parallel; the result order never depends on `workers`.
    template <class T, class Fn>
    std::vector<T> parallel_map(std::size_t n, unsigned workers, Fn &&fn)
    {
        std::vector<T> out(n);
        parallel_for(n, workers, [&](std::size_t i) { out[i] = fn(i); });
        return out;
    }
} // namespace csl
