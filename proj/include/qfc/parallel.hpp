#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace qfc {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// visited exactly once, so callers writing to disjoint slots stay
/// deterministic regardless of the thread count.
template <typename Fn>
void parallel_for(std::ptrdiff_t count, int threads, Fn&& fn) {
  const std::ptrdiff_t workers = std::clamp<std::ptrdiff_t>(threads, 1, std::max<std::ptrdiff_t>(count, 1));
  if (workers == 1) {
    for (std::ptrdiff_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (std::ptrdiff_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::ptrdiff_t i = w; i < count; i += workers) fn(i);
    });
  }
}

}  // namespace qfc
