#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace edaqa {

/// Worker count used by parallel_for (defaults to 1). Values < 1 mean 1.
void set_worker_count(int n);
int worker_count();

/// Runs fn(0..n-1) across the configured workers. Nested calls run serially
/// on the calling worker. Each index must write only its own output slot, so
/// results never depend on scheduling. The first exception thrown is
/// rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Independent PRNG stream seed for work unit `unit` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t unit);

}  // namespace edaqa
