#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "packetsim/rng.hpp"

using packetsim::Rng;
using packetsim::mix64;

// The finalizer and the stream are frozen: changing either silently breaks
// replayability of every recorded run, so the reference values are pinned
// at compile time and against the first outputs of the zero seed.
static_assert(mix64(0x9e3779b97f4a7c15ULL) == 0xe220a8397b1dcdafULL);

TEST_CASE("zero seed reproduces the reference output stream") {
  Rng r(0);
  CHECK(r.next_u64() == 0xe220a8397b1dcdafULL);
  CHECK(r.next_u64() == 0x6e789e6aa1b965f4ULL);
  CHECK(r.next_u64() == 0x06c45d188009454fULL);
}

TEST_CASE("equal seeds give equal sequences, stream splitting gives fresh ones") {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng s1 = Rng::stream(42, 7), s1b = Rng::stream(42, 7);
  Rng s2 = Rng::stream(42, 8);
  bool differs = false;
  for (int i = 0; i < 8; ++i) {
    const std::uint64_t v = s1.next_u64();
    CHECK(v == s1b.next_u64());
    if (v != s2.next_u64()) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("uniform stays in [0, 1) and has the right first two moments") {
  Rng r(12345);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  // 5 sigma bands: sd(mean) = 1/sqrt(12 n)
  CHECK(std::abs(mean - 0.5) < 5.0 / std::sqrt(12.0 * n));
  CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("uniform_open stays in (0, 1]") {
  Rng r(777);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform_open();
    REQUIRE(u > 0.0);
    REQUIRE(u <= 1.0);
  }
}

TEST_CASE("exponential variates are positive with the requested mean") {
  Rng r(31415);
  const int n = 200000;
  const double mean_in = 2.5;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = r.exponential(mean_in);
    REQUIRE(t > 0.0);
    sum += t;
  }
  // sd(sample mean) = mean / sqrt(n)
  CHECK(std::abs(sum / n - mean_in) < 5.0 * mean_in / std::sqrt(double(n)));
}

TEST_CASE("normal variates have zero mean and unit variance") {
  Rng r(2718);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = r.normal();
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 5.0 / std::sqrt(double(n)));
  CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("categorical draws follow the weight vector") {
  Rng r(5150);
  const double w[4] = {1.0, 2.0, 3.0, 4.0};
  const int n = 100000;
  int counts[4] = {0, 0, 0, 0};
  for (int i = 0; i < n; ++i) {
    const int k = r.categorical(w, 4, 10.0);
    REQUIRE(k >= 0);
    REQUIRE(k < 4);
    ++counts[k];
  }
  for (int k = 0; k < 4; ++k) {
    const double p = w[k] / 10.0;
    const double sd = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(double(counts[k]) / n - p) < 5.0 * sd);
  }
}

TEST_CASE("categorical never selects a zero-weight leading cell") {
  Rng r(864);
  const double w[2] = {0.0, 1.0};
  for (int i = 0; i < 20000; ++i) CHECK(r.categorical(w, 2, 1.0) == 1);
}

TEST_CASE("categorical with one cell always returns it") {
  Rng r(1);
  const double w[1] = {3.0};
  for (int i = 0; i < 100; ++i) CHECK(r.categorical(w, 1, 3.0) == 0);
}
