#pragma once

#include <cstddef>
#include <functional>

namespace fluxfsp {

/// Number of worker threads internal kernels may use. Defaults to the
/// hardware concurrency, capped by the FLUXFSP_THREADS environment variable.
std::size_t max_threads();

/// Overrides max_threads() for the rest of the process (0 restores the default).
void set_max_threads(std::size_t n);

/// Runs body(begin, end) over fixed-size chunks of [0, n). Chunk boundaries
/// depend only on n and grain, so results are identical for any thread count.
void parallel_chunks(std::size_t n, std::size_t grain,
                     const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace fluxfsp
