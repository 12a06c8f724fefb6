#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace cascade {

// Number of worker threads to use when the caller passes 0.
inline unsigned default_workers() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// Splits [0, count) into contiguous chunks and runs body(begin, end)
// on each, one chunk per worker. Returns the per-chunk results in chunk order,
// so any reduction the caller performs is independent of scheduling.
template <class Result, class Body>
std::vector<Result> parallel_chunks(std::uint64_t count, unsigned workers, Body body) {
    if (workers == 0) workers = default_workers();
    workers = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, count)));
    std::vector<Result> results(workers);
    std::vector<std::exception_ptr> errors(workers);
    auto run = [&](unsigned w) {
        const std::uint64_t begin = count * w / workers;
        const std::uint64_t end = count * (w + 1) / workers;
        try {
            results[w] = body(begin, end);
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

}  // namespace cascade
