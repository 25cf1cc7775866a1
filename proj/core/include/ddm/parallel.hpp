#ifndef DDM_PARALLEL_HPP
#define DDM_PARALLEL_HPP

#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace ddm {

/// Runs body(worker_id, begin, end) over a static contiguous partition of
/// [begin, end) on `workers` threads. The partition depends only on the
/// range and the worker count, never on scheduling, so workers that write
/// to disjoint regions produce identical results for any worker count.
/// Exceptions thrown by workers are rethrown on the calling thread.
template <typename Body>
void parallel_blocks(std::int64_t begin, std::int64_t end, int workers, Body&& body)
{
    const std::int64_t total = end - begin;
    if (total <= 0)
        return;
    if (workers < 1)
        workers = 1;
    if (static_cast<std::int64_t>(workers) > total)
        workers = static_cast<int>(total);

    if (workers == 1) {
        body(0, begin, end);
        return;
    }

    const std::int64_t chunk = total / workers;
    const std::int64_t extra = total % workers;

    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    threads.reserve(static_cast<std::size_t>(workers));

    std::int64_t cursor = begin;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t len = chunk + (w < extra ? 1 : 0);
        const std::int64_t b = cursor;
        const std::int64_t e = b + len;
        cursor = e;
        threads.emplace_back([&, w, b, e] {
            try {
                body(w, b, e);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : threads)
        t.join();
    for (auto& err : errors)
        if (err)
            std::rethrow_exception(err);
}

} // namespace ddm

#endif
