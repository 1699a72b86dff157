#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace amgd {

// Deterministic random source. All randomness in the library flows through
// this wrapper; doubles are derived from raw mt19937_64 words so that streams
// are bit-identical across standard library implementations
// (std::uniform_real_distribution and friends are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; used where a zero draw must be impossible.
  double uniform_open() { return 1.0 - uniform(); }

  // Uniform integer in {0, ..., n-1}.
  int uniform_int(int n) {
    int v = static_cast<int>(uniform() * n);
    return v < n ? v : n - 1;
  }

  // Standard normal via Box-Muller (one value per pair of uniform draws).
  double normal() {
    double u1 = uniform_open();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace amgd
