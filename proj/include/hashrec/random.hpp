#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hashrec {

/// mt19937_64 with distribution helpers built directly on its raw output, so
/// generated data does not depend on the standard library's distribution
/// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire-style rejection keeps the draw unbiased.
    std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  /// Continuous power law p(x) ~ x^-alpha on [x_min, inf).
  double power_law(double alpha, double x_min) {
    return x_min * std::pow(1.0 - uniform(), -1.0 / (alpha - 1.0));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hashrec
