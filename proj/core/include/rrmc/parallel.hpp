#pragma once

#include <cstddef>
#include <functional>

namespace rrmc {

/// Runs task(i) for i in [0, count) on up to `threads` workers. Tasks are
/// claimed dynamically; callers keep results deterministic by writing to
/// per-task buffers and merging them in task order.
void parallel_for(unsigned threads, std::size_t count, const std::function<void(std::size_t)>& task);

/// Hardware concurrency, at least 1.
unsigned default_thread_count();

/// Fixed particle partition, independent of the worker count.
struct ParticleGroups {
  std::size_t particles;
  std::size_t groups;

  static ParticleGroups for_particles(std::size_t particles);

  std::size_t begin(std::size_t g) const noexcept { return g * particles / groups; }
  std::size_t end(std::size_t g) const noexcept { return (g + 1) * particles / groups; }
};

}  // namespace rrmc
