#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

namespace pauliflow {

std::size_t hardware_threads();

/// Evaluates fn(0..count-1) on up to `threads` workers. Results are stored by
/// index, so the output never depends on scheduling. If any call throws, the
/// exception of the lowest failing index is rethrown.
template <typename Fn>
auto parallel_map(std::size_t count, std::size_t threads, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, std::size_t>>
{
    using Result = std::invoke_result_t<Fn&, std::size_t>;
    std::vector<Result> results(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t index = next.fetch_add(1); index < count; index = next.fetch_add(1)) {
            try {
                results[index] = fn(index);
            } catch (...) {
                errors[index] = std::current_exception();
            }
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& error : errors) {
        if (error) {
            std::rethrow_exception(error);
        }
    }
    return results;
}

} // namespace pauliflow
