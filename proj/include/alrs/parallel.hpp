#pragma once

#include <cstddef>
#include <functional>

namespace alrs {

/// Worker count for internal loops. Honors LSR_REGISTER_THREADS when set to a
/// positive integer, otherwise the hardware concurrency.
unsigned workerCount();

/// Runs body(i) for i in [begin, end) split into contiguous chunks across
/// workerCount() threads. Each index is visited exactly once; body must only
/// write state owned by index i.
void parallelFor(std::size_t begin, std::size_t end,
                 const std::function<void(std::size_t)>& body);

}  // namespace alrs
