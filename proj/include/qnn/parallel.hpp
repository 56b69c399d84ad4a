#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace qnn {

/// Serial is the reference path; Parallel spreads independent samples over
/// OpenMP threads and must produce bit-identical results.
enum class Execution { Serial, Parallel };

/// Calls fn(i) for i in [0, n). In parallel mode the first exception by index
/// is rethrown after all iterations finish.
template <class Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn) {
    if (exec == Execution::Serial) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace qnn
