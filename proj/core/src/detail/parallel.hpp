#pragma once

#include <cstddef>
#include <functional>

namespace netlqr::detail {

void set_thread_count(int threads);
int thread_count();

/// Runs fn(i) for i in [0, count) across the configured number of threads.
/// Work items must be independent and write only to their own output slot;
/// the index partition is deterministic, so results never depend on the
/// thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace netlqr::detail
