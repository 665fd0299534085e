#include "biosec/attack.hpp"

#include <string>
#include <utility>

#include "biosec/error.hpp"

namespace biosec::attack {

namespace {

void require_open_probability(const BigReal& f, const char* name) {
  if (!(f > 0.0 && f < 1.0)) {
    throw PreconditionError(std::string(name) + " must lie in (0, 1), got " + f.to_string(6));
  }
}

void require_dependent_condition(const BigReal& f, const Population& population) {
  if (!(f * (population.n_users() * 2.0) <= 1.0)) {
    throw PreconditionError("dependent model requires FMR <= 1/(2N) (Bonferroni bound); got FMR=" +
                            f.to_string(6) + ", N=" + population.n_users().to_string(6));
  }
}

// log2(ln2) - log2(denominator)
BigReal log2_ln2_over(const BigReal& denominator) {
  const Context ctx(denominator.precision());
  return log2(ctx.ln2()) - log2(denominator);
}

AttackBounds bounds_from(const BigReal& f_for_lower, const BigReal& f_for_upper, const Population& population,
                         Model model, FmrBasis basis) {
  const BigReal& n = population.n_users();
  AttackBounds out{BigReal(f_for_lower.precision()), BigReal(f_for_lower.precision()), model, basis};
  if (model == Model::independent) {
    out.log2_lower = log2_ln2_over(n * (f_for_lower + f_for_lower * f_for_lower));
    out.log2_upper = log2_ln2_over(n * f_for_upper);
  } else {
    out.log2_lower = log2_ln2_over(n * f_for_lower + n * n * f_for_lower * f_for_lower);
    out.log2_upper = log2_ln2_over(f_for_upper);
  }
  return out;
}

}  // namespace

SecurityLevel::SecurityLevel(BigReal log2_attempts) : log2_attempts_(std::move(log2_attempts)) {
  if (!log2_attempts_.is_finite() || log2_attempts_ < 0.0) {
    throw PreconditionError("security level must be a finite, nonnegative number of bits, got " +
                            log2_attempts_.to_string(6));
  }
}

Population::Population(BigReal n_users) : n_users_(std::move(n_users)) {
  if (!n_users_.is_finite() || n_users_ < 1.0) {
    throw PreconditionError("population must be a finite count >= 1, got " + n_users_.to_string(6));
  }
}

std::string_view to_string(Model model) { return model == Model::independent ? "independent" : "dependent"; }

Model parse_model(std::string_view text) {
  if (text == "independent") return Model::independent;
  if (text == "dependent") return Model::dependent;
  throw PreconditionError("model must be 'independent' or 'dependent', got '" + std::string(text) + "'");
}

std::string_view to_string(FmrBasis basis) { return basis == FmrBasis::point ? "point" : "ci"; }

BigReal geometric_median(const BigReal& success_prob) {
  if (!(success_prob > 0.0 && success_prob < 1.0)) {
    throw DomainError("geometric median requires 0 < p < 1, got " + success_prob.to_string(6));
  }
  const Context ctx(success_prob.precision());
  return snapped_ceil(-ctx.ln2() / log1p(-success_prob));
}

AttackBounds untargeted_bounds(const BigReal& fmr, const Population& population, Model model) {
  require_open_probability(fmr, "FMR");
  if (model == Model::dependent) require_dependent_condition(fmr, population);
  return bounds_from(fmr, fmr, population, model, FmrBasis::point);
}

AttackBounds untargeted_bounds(const stats::ConfidenceInterval& ci, const Population& population, Model model) {
  if (!(ci.upper > 0.0 && ci.upper <= 1.0)) {
    throw PreconditionError("CI upper bound must lie in (0, 1], got " + ci.upper.to_string(6));
  }
  if (!(ci.lower >= 0.0 && ci.lower <= ci.upper)) {
    throw PreconditionError("CI lower bound must lie in [0, upper], got " + ci.lower.to_string(6));
  }
  if (model == Model::dependent) require_dependent_condition(ci.upper, population);
  return bounds_from(ci.upper, ci.lower, population, model, FmrBasis::ci);
}

AttackBounds scale_for_authentication(AttackBounds bounds, const Population& population) {
  const BigReal shift = log2(population.n_users());
  bounds.log2_lower += shift;
  bounds.log2_upper += shift;
  return bounds;
}

CriticalPopulation critical_population(const BigReal& fmr, const SecurityLevel& security) {
  require_open_probability(fmr, "FMR");
  const BigReal log2_raw = log2_ln2_over(fmr + fmr * fmr) - security.log2_attempts();
  const BigReal raw = exp2(log2_raw);
  if (raw < 1.0) return CriticalPopulation{BigReal(0.0, fmr.precision()), log2_raw, true};
  return CriticalPopulation{snapped_floor(raw), log2_raw, false};
}

BigReal critical_fmr_untargeted(const Population& population, const SecurityLevel& security) {
  const int precision = population.n_users().precision();
  const Context ctx(precision);
  const BigReal x = ctx.ln2() / (population.n_users() * ctx.pow2(security.log2_attempts()));
  return x / (0.5 + sqrt(0.25 + x));
}

ParadoxEstimate confidence_paradox_n(const Population& population, const SecurityLevel& security, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("alpha must lie in (0, 1)");
  const Context ctx(population.n_users().precision());
  ParadoxEstimate out{critical_fmr_untargeted(population, security), ctx.zero(), ctx.zero(), ctx.zero(),
                      ctx.zero()};
  out.gap = out.critical_fmr / 2.0;
  out.quantile = stats::normal_quantile(1.0 - ctx.real(alpha) / 2.0);
  const BigReal& f = out.critical_fmr;
  out.comparisons = ceil(out.quantile * out.quantile * f * (1.0 - f) / (out.gap * out.gap) + 1.0);
  out.log2_comparisons = log2(out.comparisons);
  return out;
}

}  // namespace biosec::attack
