#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace spdiag {

/// 0 -> hardware concurrency (at least 1); SPDIAG_THREADS caps the result.
unsigned resolve_threads(unsigned requested);

/// Calls body(i) for i in [0, n) on up to `threads` workers. The first
/// exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body);

/// SplitMix64 finalizer; derives independent stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace spdiag
