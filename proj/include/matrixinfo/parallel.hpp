#pragma once

#include <cstddef>
#include <functional>

namespace matrixinfo {

/// Worker cap: MATRIXINFO_THREADS when set (minimum 1), otherwise the
/// hardware concurrency.
std::size_t max_workers();

/// Runs fn(i) for i in [0, n). Each index must write only its own output
/// slot, so results never depend on the worker count or schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace matrixinfo
