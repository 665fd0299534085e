#pragma once

// Untargeted-attack complexity: median attacker rounds, critical population
// and critical FMR for a required security level.

#include <string_view>

#include "biosec/numerics.hpp"
#include "biosec/stats.hpp"

namespace biosec::attack {

/// Required attacker work S = 2^log2_attempts.
class SecurityLevel {
 public:
  explicit SecurityLevel(BigReal log2_attempts);
  const BigReal& log2_attempts() const { return log2_attempts_; }

 private:
  BigReal log2_attempts_;
};

/// Number of enrolled users N. Real values >= 1 are accepted so that sweeps
/// over log10(N) stay continuous.
class Population {
 public:
  explicit Population(BigReal n_users);
  const BigReal& n_users() const { return n_users_; }

 private:
  BigReal n_users_;
};

enum class Model { independent, dependent };
enum class FmrBasis { point, ci };

std::string_view to_string(Model model);
Model parse_model(std::string_view text);
std::string_view to_string(FmrBasis basis);

/// Bounds on the median number of attacker rounds, stored as log2.
struct AttackBounds {
  BigReal log2_lower;
  BigReal log2_upper;
  Model model = Model::independent;
  FmrBasis fmr_basis = FmrBasis::point;

  BigReal lower() const { return exp2(log2_lower); }
  BigReal upper() const { return exp2(log2_upper); }
};

/// Median of the first-success round for per-round success probability p:
/// ceil(-1 / log2(1 - p)). Throws DomainError unless 0 < p < 1.
BigReal geometric_median(const BigReal& success_prob);

/// Independent model: ln2 / (N (f + f^2)) <= m <= ln2 / (N f).
/// Dependent model (requires f <= 1/(2N)): ln2 / (N f + N^2 f^2) <= m <= ln2 / f.
AttackBounds untargeted_bounds(const BigReal& fmr, const Population& population, Model model);

/// As above with the interval's upper end in the lower bound and its lower end in
/// the upper bound. A zero lower end yields an infinite upper bound.
AttackBounds untargeted_bounds(const stats::ConfidenceInterval& ci, const Population& population, Model model);

/// Authentication-mode view: each round costs N attempts, shifting both bounds by log2 N.
AttackBounds scale_for_authentication(AttackBounds bounds, const Population& population);

struct CriticalPopulation {
  /// floor(ln2 / (S (f + f^2))), or 0 when that value is below one.
  BigReal n_users;
  /// log2 of the unfloored value.
  BigReal log2_raw;
  bool unattainable = false;
};

/// Largest population whose untargeted-attack lower bound still meets S.
CriticalPopulation critical_population(const BigReal& fmr, const SecurityLevel& security);

/// Largest FMR meeting S for N users: the positive root of f^2 + f - ln2/(N S),
/// evaluated as x / (1/2 + sqrt(1/4 + x)) with x = ln2/(N S).
BigReal critical_fmr_untargeted(const Population& population, const SecurityLevel& security);

/// Comparisons needed before a confidence interval fits below the critical FMR.
struct ParadoxEstimate {
  BigReal critical_fmr;
  /// Width the interval half-width must fit in: critical_fmr / 2.
  BigReal gap;
  /// Normal quantile at 1 - alpha/2.
  BigReal quantile;
  /// ceil(c^2 f (1 - f) / w^2 + 1).
  BigReal comparisons;
  BigReal log2_comparisons;
};

ParadoxEstimate confidence_paradox_n(const Population& population, const SecurityLevel& security,
                                     double alpha = stats::kDefaultAlpha);

}  // namespace biosec::attack
