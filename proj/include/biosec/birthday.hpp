#pragma once

// Biometric birthday problem: probability that some pair of enrolled users
// falsely matches, in the independent-pairs approximation and in the exact
// draw-without-replacement model over a finite reference pool.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "biosec/attack.hpp"
#include "biosec/numerics.hpp"
#include "biosec/stats.hpp"

namespace biosec::birthday {

using attack::Population;

/// N users and their N(N-1)/2 unordered pairs.
struct PairCount {
  BigReal n_users;
  BigReal n_pairs;

  static PairCount of_users(const BigReal& n_users);
};

/// The K users (and K(K-1)/2 pairs) the FMR was estimated on. Requires K >= 2.
class ReferencePool {
 public:
  explicit ReferencePool(BigReal k_users);
  const BigReal& k_users() const { return k_users_; }
  const BigReal& k_pairs() const { return k_pairs_; }

 private:
  BigReal k_users_;
  BigReal k_pairs_;
};

enum class Method { approximate, exact };
std::string_view to_string(Method method);

struct CollisionResult {
  BigReal probability;
  std::optional<BigReal> lower;
  std::optional<BigReal> upper;
  /// For the exact method, N is only known when computed from users; pair-level
  /// calls report n_users = 0.
  PairCount pairs;
  Method method = Method::approximate;
  /// Exact method: (1-f)K - N + 1 <= 0, the non-matching pairs are exhausted and P = 1.
  bool exhausted = false;
  /// Exact method: the looser exhaustion test (1-f)K - 1 <= N also holds.
  bool exhausted_loose = false;
};

/// 1 - (1 - f)^(N(N-1)/2). Requires 0 <= f < 1.
CollisionResult birthday_approx(const BigReal& fmr, const Population& population);

/// Point estimate from ci.estimate, lower from ci.lower, upper from ci.upper.
CollisionResult birthday_approx(const stats::ConfidenceInterval& ci, const Population& population);

struct CriticalPopulation {
  /// floor(1/2 + 1/2 sqrt(1 + 8 ln(1-p) / ln(1-f))).
  BigReal n_users;
  BigReal exact_root;
  /// sqrt(2 ln(1-p) / ln(1-f)).
  BigReal sqrt_approximation;
};

/// Largest N whose approximate collision probability stays <= p_max.
CriticalPopulation birthday_critical_population(const BigReal& fmr, const BigReal& p_max);

/// Largest FMR keeping the collision probability <= p_max: -expm1(ln(1-p) / (N(N-1)/2)).
/// Throws PreconditionError for N < 2.
BigReal birthday_critical_fmr(const Population& population, const BigReal& p_max);

struct ExactOptions {
  /// Round (1-f) K to the nearest integer count of non-matching reference pairs.
  bool round_false_pairs = false;
};

/// P = 1 - C((1-f)K, N) / C(K, N) with K, N the reference and deployment pair
/// counts; the binomials are generalized to real (1-f)K through lgamma.
/// Requires N <= K.
CollisionResult birthday_exact(const BigReal& fmr, const ReferencePool& reference, const Population& population,
                               ExactOptions options = {});

/// Pair-level form of birthday_exact for arbitrary (not necessarily triangular) pair counts.
CollisionResult birthday_exact_pairs(const BigReal& fmr, const BigReal& k_pairs, const BigReal& n_pairs,
                                     ExactOptions options = {});

struct GapPoint {
  BigReal k_users;
  BigReal gap;
};

/// |P_exact(K) - P_approx| for each K in the sweep.
std::vector<GapPoint> exact_vs_approx_gap(const BigReal& fmr, const Population& population,
                                          std::span<const BigReal> k_sweep);

}  // namespace biosec::birthday
