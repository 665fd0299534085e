#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "biosec/numerics.hpp"

namespace biosec::test {

inline double rel_diff(double a, double b) {
  if (a == b) return 0.0;
  return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

inline BigReal rel_diff(const BigReal& a, const BigReal& b) {
  if (a == b) return BigReal(0.0, a.precision());
  return abs(a - b) / max(abs(a), abs(b));
}

// Deterministic sampler for property tests.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

  // 10^u with u uniform on [lo_exp, hi_exp].
  double log_uniform(double lo_exp, double hi_exp) { return std::pow(10.0, uniform(lo_exp, hi_exp)); }

  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace biosec::test
