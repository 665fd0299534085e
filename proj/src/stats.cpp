#include "biosec/stats.hpp"

#include <functional>
#include <sstream>
#include <string>

#include "biosec/error.hpp"

namespace biosec::stats {

namespace {

constexpr int kMaxFractionTerms = 10'000'000;
constexpr int kMaxSolverSteps = 400;

BigReal epsilon_for(int precision) {
  BigReal eps(1.0, precision);
  mpfr_mul_2si(eps.get(), eps.get(), 4 - precision, MPFR_RNDN);
  return eps;
}

// Lentz evaluation of the continued fraction for I_x(a, b).
BigReal beta_fraction(const BigReal& a, const BigReal& b, const BigReal& x) {
  const int precision = x.precision();
  const BigReal eps = epsilon_for(precision);
  BigReal tiny(1.0, precision);
  mpfr_mul_2si(tiny.get(), tiny.get(), -4 * precision, MPFR_RNDN);

  const BigReal qab = a + b;
  const BigReal qap = a + 1.0;
  const BigReal qam = a - 1.0;
  BigReal c(1.0, precision);
  BigReal d = 1.0 - qab * x / qap;
  if (abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  BigReal h = d;
  for (int m = 1; m <= kMaxFractionTerms; ++m) {
    const double md = m;
    const BigReal m2 = BigReal(2.0 * md, precision);
    BigReal aa = md * (b - md) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -((a + md) * (qab + md) * x) / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const BigReal delta = d * c;
    h *= delta;
    if (abs(delta - 1.0) <= eps) return h;
  }
  throw DomainError("incomplete beta continued fraction did not converge");
}

// Safeguarded Newton iteration for an increasing cdf on [0, inf) with cdf(0) = 1/2.
BigReal solve_upper_quantile(const std::function<BigReal(const BigReal&)>& cdf,
                             const std::function<BigReal(const BigReal&)>& pdf, const BigReal& p) {
  const int precision = p.precision();
  BigReal lo(0.0, precision);
  BigReal hi(1.0, precision);
  while (cdf(hi) < p) {
    lo = hi;
    hi = hi * 2.0;
    if (hi > 1e300) throw DomainError("quantile bracket diverged");
  }
  BigReal t = (lo + hi) / 2.0;
  for (int step = 0; step < kMaxSolverSteps; ++step) {
    const BigReal residual = cdf(t) - p;
    if (residual.is_zero()) return t;
    if (residual < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    BigReal next = t - residual / pdf(t);
    if (!(next > lo && next < hi)) next = (lo + hi) / 2.0;
    const bool converged = abs(next - t) <= abs(next) * kQuantileRelTolerance;
    t = next;
    if (converged) {
      // One extra Newton step after the tolerance is met.
      return t - (cdf(t) - p) / pdf(t);
    }
  }
  throw DomainError("quantile solver did not converge");
}

}  // namespace

std::string_view to_string(Sided sided) { return sided == Sided::one_sided ? "one" : "two"; }

Sided parse_sided(std::string_view text) {
  if (text == "one" || text == "one_sided" || text == "one-sided") return Sided::one_sided;
  if (text == "two" || text == "two_sided" || text == "two-sided") return Sided::two_sided;
  throw PreconditionError("sided must be 'one' or 'two', got '" + std::string(text) + "'");
}

void FmrEstimate::validate() const {
  if (!(fmr_hat >= 0.0 && fmr_hat <= 1.0)) {
    throw PreconditionError("fmr_hat must lie in [0, 1], got " + fmr_hat.to_string(6));
  }
  if (n < 2) throw PreconditionError("confidence interval needs n >= 2 comparisons, got " + std::to_string(n));
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw PreconditionError("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

FmrEstimate FmrEstimate::from_counts(const Context& ctx, std::uint64_t false_matches, std::uint64_t total,
                                     double alpha) {
  if (total == 0) throw PreconditionError("total comparison count must be positive");
  if (false_matches > total) {
    throw PreconditionError("false matches (" + std::to_string(false_matches) + ") exceed total comparisons (" +
                            std::to_string(total) + ")");
  }
  return FmrEstimate{ctx.integer(false_matches) / ctx.integer(total), total, alpha};
}

FmrEstimate estimate_fmr(const Context& ctx, const ScoreVector& scores, double alpha) {
  if (scores.scores.empty()) throw PreconditionError("score vector is empty");
  std::uint64_t matches = 0;
  for (double v : scores.scores) {
    if (scores.threshold - v >= 0.0) ++matches;
  }
  return FmrEstimate::from_counts(ctx, matches, scores.scores.size(), alpha);
}

std::vector<double> read_scores(std::istream& in) {
  std::vector<double> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line.substr(first));
    double value = 0.0;
    std::string rest;
    if (!(fields >> value) || (fields >> rest)) {
      throw PreconditionError("score file line " + std::to_string(line_no) + " is not a single number: '" +
                              line + "'");
    }
    scores.push_back(value);
  }
  return scores;
}

BigReal incomplete_beta(const BigReal& a, const BigReal& b, const BigReal& x, const BigReal& one_minus_x) {
  const int precision = x.precision();
  if (!(a > 0.0 && b > 0.0)) throw DomainError("incomplete beta requires a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta requires x in [0, 1]");
  if (x.is_zero()) return BigReal(0.0, precision);
  if (one_minus_x.is_zero()) return BigReal(1.0, precision);
  const BigReal log_front = a * log(x) + b * log(one_minus_x) - (lgamma(a) + lgamma(b) - lgamma(a + b));
  const BigReal front = exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_fraction(b, a, one_minus_x) / b;
}

BigReal t_cdf(std::uint64_t df, const BigReal& t) {
  if (df == 0) throw DomainError("t distribution needs df >= 1");
  const int precision = t.precision();
  if (t.is_zero()) return BigReal(0.5, precision);
  BigReal nu(precision);
  mpfr_set_uj(nu.get(), df, MPFR_RNDN);
  const BigReal t2 = t * t;
  const BigReal denom = nu + t2;
  const BigReal tail = incomplete_beta(nu / 2.0, BigReal(0.5, precision), nu / denom, t2 / denom) / 2.0;
  return t > 0.0 ? 1.0 - tail : tail;
}

BigReal normal_quantile(const BigReal& p) {
  if (!(p >= 0.5 && p < 1.0)) throw DomainError("normal quantile requires 0.5 <= p < 1, got " + p.to_string(6));
  const int precision = p.precision();
  if (p == 0.5) return BigReal(0.0, precision);
  const BigReal inv_sqrt2 = 1.0 / sqrt(BigReal(2.0, precision));
  BigReal two_pi(precision);
  mpfr_const_pi(two_pi.get(), MPFR_RNDN);
  two_pi = two_pi * 2.0;
  const BigReal pdf_scale = 1.0 / sqrt(two_pi);
  auto cdf = [&](const BigReal& z) { return erfc(-z * inv_sqrt2) / 2.0; };
  auto pdf = [&](const BigReal& z) { return pdf_scale * exp(-(z * z) / 2.0); };
  return solve_upper_quantile(cdf, pdf, p);
}

BigReal t_quantile(const Context& ctx, std::uint64_t df, const BigReal& tail_prob) {
  if (df < 1) throw DomainError("t quantile requires df >= 1");
  BigReal p = tail_prob;
  if (p.precision() != ctx.precision_bits()) mpfr_prec_round(p.get(), ctx.precision_bits(), MPFR_RNDN);
  if (!(p >= 0.5 && p < 1.0)) throw DomainError("t quantile requires 0.5 <= tail_prob < 1, got " + p.to_string(6));
  if (df > kNormalFallbackDf) return normal_quantile(p);
  if (p == 0.5) return ctx.zero();

  const BigReal nu = ctx.integer(df);
  const BigReal log_norm = lgamma((nu + 1.0) / 2.0) - lgamma(nu / 2.0) - log(nu * ctx.pi()) / 2.0;
  const BigReal half_exponent = (nu + 1.0) / 2.0;
  auto cdf = [&](const BigReal& t) { return t_cdf(df, t); };
  auto pdf = [&](const BigReal& t) { return exp(log_norm - half_exponent * log1p(t * t / nu)); };
  return solve_upper_quantile(cdf, pdf, p);
}

ConfidenceInterval confidence_interval(const FmrEstimate& estimate, Sided sided) {
  estimate.validate();
  const int precision = estimate.fmr_hat.precision();
  const Context ctx(precision);
  const BigReal tail = sided == Sided::two_sided ? 1.0 - ctx.real(estimate.alpha) / 2.0
                                                 : 1.0 - ctx.real(estimate.alpha);
  ConfidenceInterval ci{estimate.fmr_hat, estimate.fmr_hat, estimate.fmr_hat,
                        t_quantile(ctx, estimate.n - 1, tail), sided, false};
  const BigReal& f = estimate.fmr_hat;
  if (f.is_zero() || f == 1.0) {
    ci.degenerate = true;
    return ci;
  }
  const BigReal half_width = ci.c_alpha * sqrt(f * (1.0 - f) / ctx.integer(estimate.n - 1));
  ci.lower = max(ctx.zero(), f - half_width);
  ci.upper = min(ctx.one(), f + half_width);
  return ci;
}

}  // namespace biosec::stats
