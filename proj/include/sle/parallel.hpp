#pragma once

#include <cstddef>
#include <functional>

namespace sle {

/// Number of worker threads used by `parallel_for`; 0 means hardware concurrency.
void set_thread_count(std::size_t threads);
std::size_t thread_count();

/// Runs `body(i)` for every i in [0, n). Each index is visited exactly once;
/// results must be written to per-index slots so output is independent of
/// scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sle
