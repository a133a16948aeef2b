#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace knotderiv {

// Knobs shared by every enumeration entry point.  parallelism = 0 picks the
// hardware thread count; node_budget bounds backtracking nodes per search task.
struct RunConfig {
  int parallelism = 0;
  long long node_budget = 100'000'000;
  std::string output = "text";  // consumed by the CLI layer
  std::optional<std::string> cache_dir;
};

class budget_exceeded : public std::runtime_error {
 public:
  explicit budget_exceeded(long long limit)
      : std::runtime_error("search node budget exceeded (limit " +
                           std::to_string(limit) + ")"),
        limit(limit) {}
  long long limit;
};

inline int effective_workers(const RunConfig& cfg) {
  if (cfg.parallelism > 0) return cfg.parallelism;
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

inline RunConfig serial(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.parallelism = 1;
  return c;
}

constexpr std::uint64_t kFnvSeed = 14695981039346656037ull;

inline std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  h ^= v;
  return h * 1099511628211ull;
}

inline std::uint64_t fnv1a_ints(std::uint64_t h, const std::vector<int>& xs) {
  h = fnv1a(h, xs.size());
  for (int x : xs) h = fnv1a(h, static_cast<std::uint64_t>(x) + 1);
  return h;
}

// Applies fn(i) for i in [0, count), spreading work over `workers` threads.
// Results keep their index, so callers see the serial order.  The first
// exception thrown by any task is rethrown after all threads join.
template <typename T, typename Fn>
std::vector<T> parallel_map(int count, int workers, Fn fn) {
  std::vector<T> out(count);
  if (count == 0) return out;
  if (workers <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::vector<std::thread> pool;
  int spawn = std::min(workers, count);
  for (int t = 0; t < spawn; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          out[i] = fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace knotderiv
