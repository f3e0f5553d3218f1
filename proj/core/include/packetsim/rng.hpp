#pragma once

#include <cmath>
#include <cstdint>

#include "packetsim/common.hpp"

namespace packetsim {

// splitmix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator with explicit stream splitting. Every stochastic
// component owns its own stream derived from (base_seed, index), so results
// do not depend on scheduling or on how many threads consumed the pool.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng stream(std::uint64_t base_seed, std::uint64_t index) {
    return Rng(mix64(base_seed + 0x9e3779b97f4a7c15ULL * (index + 1)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // (0, 1], safe under log()
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double exponential(double mean) {
    double u = uniform_open();
    if (u == 1.0) u = 1.0 - 0x1.0p-53;  // keep the variate positive (and finite * inf sane)
    return -mean * std::log(u);
  }

  // Box-Muller, one variate per call (two u64 draws)
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Index into non-negative weights with known total. Consumes one uniform.
  int categorical(const double* weights, int n, double total) {
    double u = uniform() * total;
    for (int i = 0; i < n - 1; ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return n - 1;
  }

 private:
  std::uint64_t state_;
};

}  // namespace packetsim
