#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace qsel {

/// Runs body(i) for i in [0, count) on up to `workers` threads (0 = all
/// hardware threads). Work items must write only to their own output slot;
/// results are then independent of the schedule. Exceptions are rethrown
/// on the caller thread (the first one caught wins).
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

int resolve_workers(int workers);

}  // namespace qsel
