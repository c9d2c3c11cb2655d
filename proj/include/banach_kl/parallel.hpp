#ifndef BANACH_KL_PARALLEL_HPP
#define BANACH_KL_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace banach_kl {

/// Worker threads to use: hardware concurrency, capped by the
/// BANACH_KL_THREADS environment variable when set to a positive integer.
std::size_t worker_count();

/// Runs body(chunk) for chunk in [0, n_chunks) on up to worker_count()
/// threads. Chunks are claimed dynamically; the body must only write to
/// chunk-owned state. The first exception thrown is rethrown.
void parallel_for_chunks(std::size_t n_chunks, const std::function<void(std::size_t)> &body);

}  // namespace banach_kl

#endif  // BANACH_KL_PARALLEL_HPP
