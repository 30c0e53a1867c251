// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace kseq {

/// Worker count: KSEQ_THREADS when set and positive, otherwise the hardware
/// concurrency (at least 1).
unsigned worker_count();

/// Calls fn(i) for every i in [0, n) across worker_count() threads. Each index
/// runs exactly once; the exception from the lowest failing index is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace kseq
