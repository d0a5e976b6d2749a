#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace hybrid {

/// Worker count: `requested` when positive, else HYBRID_SAMPLER_THREADS when
/// set to a positive integer, else the hardware concurrency.
int worker_count(int requested = 0);

/// Calls body(i) for every i in [0, count) on up to `workers` threads. Tasks
/// are claimed dynamically, so body must write only to per-index slots.
template <class Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads - 1);
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(run);
  run();
}

/// Pairwise reduction in a fixed tree shape, independent of how the values
/// were produced.
template <class T>
T pairwise_sum(std::vector<T> values) {
  if (values.empty()) return T{};
  while (values.size() > 1) {
    std::size_t half = 0;
    for (std::size_t i = 0; i + 1 < values.size(); i += 2) values[half++] = values[i] + values[i + 1];
    if (values.size() % 2 == 1) values[half++] = values.back();
    values.resize(half);
  }
  return values.front();
}

}  // namespace hybrid
