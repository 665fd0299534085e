#pragma once

// Independent verification engines: Monte-Carlo simulation of the untargeted
// attack and exact enumeration for small birthday instances.

#include <cstdint>
#include <string>

#include "biosec/numerics.hpp"

namespace biosec::oracle {

struct SimConfig {
  BigReal fmr;
  std::uint64_t n_users = 1;
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 0;
  /// Worker threads; 0 picks hardware concurrency. Results do not depend on it.
  unsigned workers = 0;
};

struct SimReport {
  std::uint64_t median_rounds = 0;
  std::uint64_t q1 = 0;
  std::uint64_t q3 = 0;
  /// Successes per simulated round: trials / sum of first-success rounds.
  double empirical_success_prob = 0.0;
  /// Per-round success probability 1 - (1 - fmr)^n_users the simulation sampled from.
  double success_prob = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::string generator;
};

/// Trials are split into fixed-size partitions, each with its own stream
/// seeded from (seed, partition index).
inline constexpr std::uint64_t kTrialsPerPartition = 1 << 14;

/// Samples the first-success round ceil(ln U / ln(1 - p)) of a Bernoulli(p)
/// sequence per trial and summarizes with nearest-rank quartiles.
SimReport simulate_untargeted(const SimConfig& config);

struct Rational {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Binomial coefficient in 64-bit integer arithmetic. Throws on overflow.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Exact probability that drawing `draw` of `k_pairs` pairs without replacement
/// hits at least one of the `false_pairs` falsely matching pairs. k_pairs <= 30.
Rational enumerate_birthday(unsigned k_pairs, unsigned false_pairs, unsigned draw);

inline constexpr std::uint64_t kScanCap = 10'000'000;

/// Smallest m with 1 - (1 - p)^m >= 1/2, found by stepping m = 1, 2, ...
/// Throws DomainError past kScanCap rounds.
std::uint64_t scan_first_success_median(const BigReal& success_prob);

}  // namespace biosec::oracle
