#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace gmnl {

/// Worker count: GMNL_THREADS caps it, hardware concurrency is the default.
inline unsigned worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("GMNL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && static_cast<unsigned>(v) < hw) hw = static_cast<unsigned>(v);
  }
  return hw;
}

/// Runs fn(chunk_index, begin, end) over [0, count) split into fixed-size
/// chunks. Chunk boundaries depend only on `count` and `chunk`, never on the
/// worker count, so per-chunk partial results can be reduced in chunk order
/// and the total is bit-identical for any number of workers.
template <typename Fn>
void for_each_chunk(std::uint64_t count, std::uint64_t chunk, Fn&& fn) {
  if (count == 0) return;
  const std::uint64_t n_chunks = (count + chunk - 1) / chunk;
  const unsigned workers = static_cast<unsigned>(
      std::min<std::uint64_t>(worker_count(), n_chunks));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c)
      fn(c, c * chunk, std::min(count, (c + 1) * chunk));
    return;
  }
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1))
      fn(c, c * chunk, std::min(count, (c + 1) * chunk));
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

/// Chunked sum of per-index doubles; reduction in chunk order (deterministic).
template <typename Fn>
double parallel_sum(std::uint64_t count, std::uint64_t chunk, Fn&& per_index) {
  const std::uint64_t n_chunks = count == 0 ? 0 : (count + chunk - 1) / chunk;
  std::vector<double> partial(n_chunks, 0.0);
  for_each_chunk(count, chunk, [&](std::uint64_t c, std::uint64_t b, std::uint64_t e) {
    double s = 0.0;
    for (std::uint64_t i = b; i < e; ++i) s += per_index(i);
    partial[c] = s;
  });
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

}  // namespace gmnl
