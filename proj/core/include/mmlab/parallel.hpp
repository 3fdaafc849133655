#pragma once

#include <cstddef>
#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace mmlab {

// Process-wide cap on worker threads (1 = sequential). Set once from the CLI.
void set_max_threads(std::size_t n);
std::size_t max_threads();

// Splits [0, n) into contiguous chunks, runs `body(begin, end)` for each and
// returns the chunk results in chunk order, so reductions over the result are
// independent of scheduling. `grain` is the smallest amount of work worth a thread.
template <class R, class Body>
std::vector<R> parallel_chunks(std::size_t n, Body body, std::size_t grain = 1024) {
    const std::size_t workers = std::max<std::size_t>(1, std::min(max_threads(), n / std::max<std::size_t>(grain, 1) + 1));
    std::vector<R> out(workers);
    if (workers == 1) {
        out[0] = body(std::size_t{0}, n);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = n * w / workers;
        const std::size_t end = n * (w + 1) / workers;
        pool.emplace_back([&, w, begin, end] {
            try {
                out[w] = body(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace mmlab
