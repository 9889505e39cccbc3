#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qaoa/rng.hpp"

using qaoa::Rng;

TEST_CASE("same seed reproduces the same stream") {
  Rng a(1234), b(1234);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds and streams disagree") {
  Rng a(1234), b(1235), c(1234, 1);
  int equal_ab = 0, equal_ac = 0;
  for (int i = 0; i < 64; ++i) {
    equal_ab += a.next_u64() == b.next_u64() ? 1 : 0;
    equal_ac += a.next_u64() == c.next_u64() ? 1 : 0;
  }
  CHECK(equal_ab == 0);
  CHECK(equal_ac == 0);
}

TEST_CASE("derive is independent of parent usage") {
  Rng parent(77);
  Rng child_before = parent.derive(5);
  (void)parent.next_u64();
  (void)parent.next_normal();
  Rng child_after = parent.derive(5);
  for (int i = 0; i < 16; ++i) {
    CHECK(child_before.next_u64() == child_after.next_u64());
  }
  Rng sibling = parent.derive(6);
  CHECK(sibling.next_u64() != parent.derive(5).next_u64());
}

TEST_CASE("uniform doubles have the right first two moments") {
  Rng rng(42);
  const int n = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    double x = rng.next_double();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    sum += x;
    sum2 += x * x;
  }
  double mean = sum / n;
  double var = sum2 / n - mean * mean;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.03));
}

TEST_CASE("normal draws consume exactly two counter positions") {
  Rng a(9), b(9);
  (void)a.next_normal();
  (void)b.next_u64();
  (void)b.next_u64();
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("normal moments") {
  Rng rng(7);
  const int n = 200000;
  double sum = 0, sum2 = 0, sum4 = 0;
  for (int i = 0; i < n; ++i) {
    double x = rng.next_normal();
    sum += x;
    sum2 += x * x;
    sum4 += x * x * x * x;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(1).scale(0.01));
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(sum4 / n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("poisson mean and variance match for small and large means") {
  for (double mean : {0.3, 3.0, 25.0, 70.0, 400.0}) {
    Rng rng(static_cast<std::uint64_t>(mean * 1000) + 1);
    const int n = 100000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
      double x = static_cast<double>(rng.next_poisson(mean));
      sum += x;
      sum2 += x * x;
    }
    double m = sum / n;
    double v = sum2 / n - m * m;
    double stderr_mean = std::sqrt(mean / n);
    CHECK(std::fabs(m - mean) < 5 * stderr_mean);
    CHECK(v == doctest::Approx(mean).epsilon(0.05));
  }
}

TEST_CASE("poisson rejects bad means") {
  Rng rng(1);
  CHECK_THROWS_AS((void)rng.next_poisson(-1.0), qaoa::validation_error);
  CHECK_THROWS_AS((void)rng.next_poisson(std::nan("")), qaoa::validation_error);
}

TEST_CASE("next_below stays in range and is roughly uniform") {
  Rng rng(2024);
  std::vector<int> counts(10, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    auto k = rng.next_below(10);
    REQUIRE(k < 10);
    ++counts[static_cast<int>(k)];
  }
  for (int c : counts) CHECK(std::fabs(c - n / 10.0) < 5 * std::sqrt(n * 0.1 * 0.9));
  CHECK_THROWS_AS((void)rng.next_below(0), qaoa::validation_error);
}
