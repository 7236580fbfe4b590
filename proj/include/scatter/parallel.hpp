#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace scatter {

/// Worker cap from SCATTER_THREADS, else hardware concurrency (at least 1).
unsigned worker_count();

/// Evaluate fn(i) for i in [0, count) across worker threads. Results are
/// stored by index, so the output never depends on scheduling. If any call
/// throws, the exception from the lowest failing index is rethrown.
template <typename Fn>
auto parallel_map(std::size_t count, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using T = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  const std::size_t workers = std::min<std::size_t>(worker_count(), count == 0 ? 1 : count);

  auto run = [&](std::size_t first) {
    for (std::size_t i = first; i < count; i += workers) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  if (workers <= 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace scatter
