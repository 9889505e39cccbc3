#pragma once

#include <cmath>
#include <cstdint>

#include "qaoa/errors.hpp"

namespace qaoa {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based generator (Philox2x64, 10 rounds). Every output is a pure
// function of (key, stream, counter), so generators for parallel work items
// can be derived up front and used in any order without changing the stream
// of any other work item.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : stream_(stream) {
    std::uint64_t x = seed;
    key_ = detail::splitmix64(x);
  }

  // Child generator for work item `substream`, independent of this one and of
  // any sibling. Does not disturb the parent's counter.
  Rng derive(std::uint64_t substream) const {
    std::uint64_t x = key_;
    x ^= 0xA0761D6478BD642Full ^ stream_;
    (void)detail::splitmix64(x);
    x ^= substream;
    Rng child = *this;
    child.key_ = detail::splitmix64(x);
    child.stream_ = detail::splitmix64(x);
    child.counter_ = 0;
    return child;
  }

  std::uint64_t next_u64() { return block(counter_++); }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Uniform integer in [0, n). Lemire's multiply-shift with rejection.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw validation_error("next_below: empty range");
    while (true) {
      std::uint64_t x = next_u64();
      __uint128_t m = static_cast<__uint128_t>(x) * n;
      std::uint64_t lo = static_cast<std::uint64_t>(m);
      if (lo >= n || lo >= (0ull - n) % n) {
        return static_cast<std::uint64_t>(m >> 64);
      }
    }
  }

  // Standard normal via Box-Muller. Always consumes exactly two draws and
  // returns the cosine branch; nothing is cached, so the mapping from counter
  // positions to outputs stays fixed.
  double next_normal() {
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Poisson draw: sequential inversion for small means, Hormann's transformed
  // rejection (PTRS) for large ones.
  long long next_poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
      throw validation_error("next_poisson: mean must be finite and nonnegative");
    }
    if (mean == 0.0) return 0;
    if (mean < 30.0) return poisson_inversion(mean);
    return poisson_ptrs(mean);
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t counter_ = 0;

  static void philox_round(std::uint64_t& c0, std::uint64_t& c1, std::uint64_t k) {
    const std::uint64_t kMul = 0xD2B74407B1CE6E93ull;
    __uint128_t prod = static_cast<__uint128_t>(kMul) * c0;
    std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
    std::uint64_t lo = static_cast<std::uint64_t>(prod);
    c0 = hi ^ k ^ c1;
    c1 = lo;
  }

  std::uint64_t block(std::uint64_t counter) const {
    std::uint64_t c0 = counter, c1 = stream_, k = key_;
    for (int round = 0; round < 10; ++round) {
      philox_round(c0, c1, k);
      k += 0x9E3779B97F4A7C15ull;
    }
    return c0;
  }

  long long poisson_inversion(double mean) {
    double p = std::exp(-mean);
    double cumulative = p;
    double u = next_double();
    long long k = 0;
    while (u > cumulative) {
      ++k;
      p *= mean / static_cast<double>(k);
      cumulative += p;
      if (k > 2000) break;  // cumulative has saturated numerically
    }
    return k;
  }

  long long poisson_ptrs(double mean) {
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    while (true) {
      double u = next_double() - 0.5;
      double v = next_double();
      double us = 0.5 - std::fabs(u);
      double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      long long k = static_cast<long long>(kf);
      double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
      double rhs = kf * log_mean - mean - std::lgamma(kf + 1.0);
      if (lhs <= rhs) return k;
    }
  }
};

}  // namespace qaoa
