#pragma once

#include <cstddef>
#include <functional>

namespace nullrec {

/// Global worker cap used by ensemble loops (CLI --threads sets it).
/// 0 or negative resets to hardware concurrency.
void set_max_threads(int n);
int max_threads();

/// Runs fn(chunk_index, begin, end) over [0, n_items) split into fixed-size
/// chunks. Chunk boundaries depend only on (n_items, chunk_size), so per-chunk
/// results combined in chunk order are identical for every thread count.
void parallel_chunks(std::size_t n_items, std::size_t chunk_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn,
                     int threads = 0);

/// Default chunk width for per-path ensemble work.
inline constexpr std::size_t kEnsembleChunk = 64;

}  // namespace nullrec
