#pragma once

#include <cstddef>
#include <functional>

namespace strataboot {

// Worker count: STRATA_BOOT_THREADS when set to a positive integer, otherwise
// the hardware concurrency (at least 1).
std::size_t default_thread_count();

// Calls body(i) for every i in [0, count) on up to `threads` workers
// (0 = default_thread_count()). Indices are handed out dynamically, so body
// must write its result to a slot owned by i; results then do not depend on
// scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

// Per-worker variant: body(worker, i) lets a worker reuse scratch buffers.
void parallel_for_workers(std::size_t count, std::size_t threads,
                          const std::function<void(std::size_t, std::size_t)>& body);

std::size_t resolve_threads(std::size_t threads, std::size_t count);

}  // namespace strataboot
