#include "biosec/birthday.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "biosec/error.hpp"

namespace biosec::birthday {

namespace {

BigReal pairs_of(const BigReal& users) { return users * (users - 1.0) / 2.0; }

void require_probability(const BigReal& p, const char* name, bool allow_zero) {
  const bool lower_ok = allow_zero ? p >= 0.0 : p > 0.0;
  if (!(lower_ok && p < 1.0)) {
    throw PreconditionError(std::string(name) + " must lie in " + (allow_zero ? "[0, 1)" : "(0, 1)") + ", got " +
                            p.to_string(6));
  }
}

}  // namespace

PairCount PairCount::of_users(const BigReal& n_users) { return PairCount{n_users, pairs_of(n_users)}; }

ReferencePool::ReferencePool(BigReal k_users) : k_users_(std::move(k_users)), k_pairs_(pairs_of(k_users_)) {
  if (!k_users_.is_finite() || k_users_ < 2.0) {
    throw PreconditionError("reference pool needs K >= 2 users, got " + k_users_.to_string(6));
  }
}

std::string_view to_string(Method method) { return method == Method::approximate ? "approximate" : "exact"; }

CollisionResult birthday_approx(const BigReal& fmr, const Population& population) {
  require_probability(fmr, "FMR", true);
  PairCount pairs = PairCount::of_users(population.n_users());
  BigReal probability = one_minus_pow(fmr, pairs.n_pairs);
  return CollisionResult{std::move(probability), std::nullopt, std::nullopt, std::move(pairs), Method::approximate};
}

CollisionResult birthday_approx(const stats::ConfidenceInterval& ci, const Population& population) {
  require_probability(ci.estimate, "FMR estimate", true);
  if (!(ci.lower >= 0.0 && ci.lower <= ci.estimate && ci.estimate <= ci.upper && ci.upper <= 1.0)) {
    throw PreconditionError("confidence interval must satisfy 0 <= lower <= estimate <= upper <= 1");
  }
  CollisionResult result = birthday_approx(ci.estimate, population);
  result.lower = one_minus_pow(ci.lower, result.pairs.n_pairs);
  result.upper = one_minus_pow(ci.upper, result.pairs.n_pairs);
  return result;
}

CriticalPopulation birthday_critical_population(const BigReal& fmr, const BigReal& p_max) {
  require_probability(fmr, "FMR", false);
  require_probability(p_max, "collision probability p", false);
  const BigReal ratio = log1p(-p_max) / log1p(-fmr);
  BigReal root = 0.5 + sqrt(1.0 + ratio * 8.0) / 2.0;
  BigReal n_users = snapped_floor(root);
  return CriticalPopulation{std::move(n_users), std::move(root), sqrt(ratio * 2.0)};
}

BigReal birthday_critical_fmr(const Population& population, const BigReal& p_max) {
  if (population.n_users() < 2.0) {
    throw PreconditionError("critical FMR needs N >= 2: with fewer users there are no pairs and any FMR is "
                            "collision-free");
  }
  require_probability(p_max, "collision probability p", false);
  return -expm1(log1p(-p_max) / pairs_of(population.n_users()));
}

CollisionResult birthday_exact_pairs(const BigReal& fmr, const BigReal& k_pairs, const BigReal& n_pairs,
                                     ExactOptions options) {
  if (!(fmr >= 0.0 && fmr <= 1.0)) throw PreconditionError("FMR must lie in [0, 1], got " + fmr.to_string(6));
  if (!(k_pairs >= 1.0) || !k_pairs.is_finite()) {
    throw PreconditionError("reference pool must contain at least one pair");
  }
  if (!(n_pairs >= 0.0)) throw PreconditionError("pair count must be nonnegative");
  if (n_pairs > k_pairs) {
    throw PreconditionError("deployment pairs (" + n_pairs.to_string(6) + ") exceed reference pairs (" +
                            k_pairs.to_string(6) + "); the exact model cannot draw more pairs than the pool defines");
  }
  const int precision = std::max(fmr.precision(), k_pairs.precision());
  BigReal non_matching = k_pairs - fmr * k_pairs;
  if (options.round_false_pairs) non_matching = round(non_matching);

  CollisionResult result{BigReal(0.0, precision), std::nullopt, std::nullopt,
                         PairCount{BigReal(0.0, precision), n_pairs}, Method::exact};
  result.exhausted_loose = non_matching - 1.0 <= n_pairs;
  if (n_pairs.is_zero() || non_matching == k_pairs) return result;

  if (non_matching - n_pairs + 1.0 <= 0.0) {
    result.exhausted = true;
    result.probability = BigReal(1.0, precision);
    return result;
  }
  const BigReal log_q = (lgamma(non_matching + 1.0) - lgamma(non_matching - n_pairs + 1.0)) -
                        (lgamma(k_pairs + 1.0) - lgamma(k_pairs - n_pairs + 1.0));
  result.probability = min(BigReal(1.0, precision), max(BigReal(0.0, precision), -expm1(log_q)));
  return result;
}

CollisionResult birthday_exact(const BigReal& fmr, const ReferencePool& reference, const Population& population,
                               ExactOptions options) {
  PairCount pairs = PairCount::of_users(population.n_users());
  CollisionResult result = birthday_exact_pairs(fmr, reference.k_pairs(), pairs.n_pairs, options);
  result.pairs = std::move(pairs);
  return result;
}

std::vector<GapPoint> exact_vs_approx_gap(const BigReal& fmr, const Population& population,
                                          std::span<const BigReal> k_sweep) {
  const BigReal approx = birthday_approx(fmr, population).probability;
  std::vector<GapPoint> out;
  out.reserve(k_sweep.size());
  for (const BigReal& k : k_sweep) {
    const BigReal exact = birthday_exact(fmr, ReferencePool(k), population).probability;
    out.push_back(GapPoint{k, abs(exact - approx)});
  }
  return out;
}

}  // namespace biosec::birthday
