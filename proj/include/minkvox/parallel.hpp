#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace minkvox {

/// Number of worker threads; read once from MINKVOX_THREADS (default: hardware concurrency).
std::size_t thread_count();

namespace detail {

inline constexpr std::size_t kChunkSize = 4096;

template <class Body>
void run_chunks(std::size_t chunk_count, Body&& body) {
  const std::size_t workers = std::min(thread_count(), chunk_count);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunk_count; ++c) body(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t c = next++; c < chunk_count; c = next++) {
      try {
        body(c);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Calls body(i) for every i in [0, n). Iterations must be independent.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t chunks = (n + detail::kChunkSize - 1) / detail::kChunkSize;
  detail::run_chunks(chunks, [&](std::size_t c) {
    const std::size_t lo = c * detail::kChunkSize;
    const std::size_t hi = std::min(n, lo + detail::kChunkSize);
    for (std::size_t i = lo; i < hi; ++i) body(i);
  });
}

/// Deterministic reduction: sums term(i) over [0, n) in fixed-size chunks and
/// adds the chunk partials in order, so the result does not depend on the
/// thread count.
template <class T, class Term>
T chunked_sum(std::size_t n, T zero, Term&& term) {
  const std::size_t chunks = (n + detail::kChunkSize - 1) / detail::kChunkSize;
  std::vector<T> partial(chunks, zero);
  detail::run_chunks(chunks, [&](std::size_t c) {
    const std::size_t lo = c * detail::kChunkSize;
    const std::size_t hi = std::min(n, lo + detail::kChunkSize);
    T acc = zero;
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    partial[c] = acc;
  });
  T total = zero;
  for (const T& p : partial) total += p;
  return total;
}

}  // namespace minkvox
