#pragma once

#include <cstddef>
#include <functional>

namespace kakeya {

/// Worker count for fan-out loops: KAKEYA_LAB_THREADS when set, otherwise
/// the hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, count) across worker_count() threads with static
/// block partitioning. Results must be written to disjoint slots; callers
/// reduce afterwards in a fixed order (max-reductions are order-free).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace kakeya
