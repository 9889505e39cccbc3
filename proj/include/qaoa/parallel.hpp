#pragma once

#include <cstdint>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qaoa {

namespace detail {
inline int& thread_override() {
  static int value = 0;
  return value;
}
}  // namespace detail

// 0 restores the default (QAOA_LIMITS_THREADS env var, then all cores).
inline void set_max_threads(int n) { detail::thread_override() = n > 0 ? n : 0; }

inline int max_threads() {
  if (detail::thread_override() > 0) return detail::thread_override();
  if (const char* env = std::getenv("QAOA_LIMITS_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Reductions below accumulate each fixed-size block in index order and then
// add the block totals in block order. The grouping is independent of the
// thread count, so parallel and serial runs agree bit for bit.
inline constexpr std::int64_t kSumBlock = 4096;

template <typename T, typename F>
T blocked_sum_serial(std::int64_t n, F&& term) {
  const std::int64_t nblocks = (n + kSumBlock - 1) / kSumBlock;
  T total{};
  for (std::int64_t b = 0; b < nblocks; ++b) {
    const std::int64_t end = std::min(n, (b + 1) * kSumBlock);
    T acc{};
    for (std::int64_t i = b * kSumBlock; i < end; ++i) acc += term(i);
    total += acc;
  }
  return total;
}

template <typename T, typename F>
T blocked_sum(std::int64_t n, F&& term) {
  const std::int64_t nblocks = (n + kSumBlock - 1) / kSumBlock;
  if (nblocks < 2 || max_threads() == 1) {
    return blocked_sum_serial<T>(n, static_cast<F&&>(term));
  }
  std::vector<T> partial(static_cast<std::size_t>(nblocks));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads())
#endif
  for (std::int64_t b = 0; b < nblocks; ++b) {
    const std::int64_t end = std::min(n, (b + 1) * kSumBlock);
    T acc{};
    for (std::int64_t i = b * kSumBlock; i < end; ++i) acc += term(i);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  T total{};
  for (const T& x : partial) total += x;
  return total;
}

template <typename F>
void parallel_for(std::int64_t n, F&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads())
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace qaoa
