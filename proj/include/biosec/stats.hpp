#pragma once

// Empirical false-match-rate estimation and Student-t confidence intervals.

#include <cstdint>
#include <istream>
#include <string_view>
#include <vector>

#include "biosec/numerics.hpp"

namespace biosec::stats {

inline constexpr double kDefaultAlpha = 0.05;
/// Above this many degrees of freedom the t quantile is replaced by the normal quantile.
inline constexpr std::uint64_t kNormalFallbackDf = 1'000'000;
inline constexpr double kQuantileRelTolerance = 1e-10;

enum class Sided { one_sided, two_sided };

std::string_view to_string(Sided sided);
Sided parse_sided(std::string_view text);

/// Empirical FMR from `n` impostor comparisons at significance level `alpha`.
struct FmrEstimate {
  BigReal fmr_hat;
  std::uint64_t n = 0;
  double alpha = kDefaultAlpha;

  /// Throws PreconditionError unless 0 <= fmr_hat <= 1, n >= 2 and 0 < alpha < 1.
  void validate() const;

  static FmrEstimate from_counts(const Context& ctx, std::uint64_t false_matches, std::uint64_t total,
                                 double alpha = kDefaultAlpha);
};

/// Interval [lower, upper] on the FMR, clamped to [0, 1].
struct ConfidenceInterval {
  BigReal estimate;
  BigReal lower;
  BigReal upper;
  BigReal c_alpha;
  Sided sided = Sided::two_sided;
  /// fmr_hat was 0 or 1: the sample variance vanishes and the interval is a point.
  bool degenerate = false;
};

/// Impostor similarity scores compared against a decision threshold.
struct ScoreVector {
  std::vector<double> scores;
  double threshold = 0.0;
};

/// Counts H(T - v_i) with the unit step H(0) = 1, i.e. every score v_i <= T is a false match.
FmrEstimate estimate_fmr(const Context& ctx, const ScoreVector& scores, double alpha = kDefaultAlpha);

/// Reads one score per line; blank lines and lines starting with '#' are skipped.
std::vector<double> read_scores(std::istream& in);

/// P(T <= t) for a Student t variable with `df` degrees of freedom.
BigReal t_cdf(std::uint64_t df, const BigReal& t);

/// c with P(T_df <= c) = tail_prob, for 0.5 <= tail_prob < 1. Falls back to the
/// normal quantile when df > kNormalFallbackDf.
BigReal t_quantile(const Context& ctx, std::uint64_t df, const BigReal& tail_prob);

/// Standard normal quantile for 0.5 <= p < 1.
BigReal normal_quantile(const BigReal& p);

/// Regularized incomplete beta I_x(a, b); `one_minus_x` must equal 1 - x and is
/// passed separately so callers can supply it without cancellation.
BigReal incomplete_beta(const BigReal& a, const BigReal& b, const BigReal& x, const BigReal& one_minus_x);

/// fmr_hat -/+ c * sqrt(fmr_hat (1 - fmr_hat) / (n - 1)) with c the t quantile at
/// n - 1 degrees of freedom: 1 - alpha/2 when two-sided, 1 - alpha when one-sided.
ConfidenceInterval confidence_interval(const FmrEstimate& estimate, Sided sided = Sided::two_sided);

}  // namespace biosec::stats
