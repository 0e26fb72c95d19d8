#include "rrmc/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rrmc {

void parallel_for(unsigned threads, std::size_t count, const std::function<void(std::size_t)>& task) {
  const auto workers = static_cast<std::size_t>(std::max(1u, threads));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      task(i);
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const auto i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) {
        return;
      }
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        next.store(count, std::memory_order_relaxed);
      }
    }
  };

  {
    std::vector<std::jthread> pool;
    const auto spawned = std::min(workers, count) - 1;
    pool.reserve(spawned);
    for (std::size_t t = 0; t < spawned; ++t) {
      pool.emplace_back(run);
    }
    run();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

unsigned default_thread_count() { return std::max(1u, std::thread::hardware_concurrency()); }

ParticleGroups ParticleGroups::for_particles(std::size_t particles) {
  // At most 16 groups, each with at least 1024 particles when possible.
  constexpr std::size_t kMaxGroups = 16;
  constexpr std::size_t kMinGroupSize = 1024;
  const auto groups = std::clamp<std::size_t>(particles / kMinGroupSize, 1, kMaxGroups);
  return {particles, groups};
}

}  // namespace rrmc
