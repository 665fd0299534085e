#include "biosec/numerics.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <utility>

#include "biosec/error.hpp"

namespace biosec {

namespace {

constexpr mpfr_rnd_t kRound = MPFR_RNDN;

void raise_precision(BigReal& target, int precision) {
  if (target.precision() < precision) {
    mpfr_prec_round(target.get(), precision, kRound);
  }
}

template <typename Fn>
BigReal unary(const BigReal& x, Fn fn) {
  BigReal result(x.precision());
  fn(result.get(), x.get(), kRound);
  return result;
}

std::partial_ordering from_cmp(int cmp, bool unordered) {
  if (unordered) return std::partial_ordering::unordered;
  if (cmp < 0) return std::partial_ordering::less;
  if (cmp > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

}  // namespace

BigReal::BigReal(int precision_bits) {
  mpfr_init2(value_, precision_bits);
  mpfr_set_zero(value_, 1);
}

BigReal::BigReal(double value, int precision_bits) {
  mpfr_init2(value_, precision_bits);
  mpfr_set_d(value_, value, kRound);
}

BigReal::BigReal(const BigReal& other) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, kRound);
}

BigReal::BigReal(BigReal&& other) noexcept {
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

BigReal& BigReal::operator=(const BigReal& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, kRound);
  }
  return *this;
}

BigReal& BigReal::operator=(BigReal&& other) noexcept {
  if (this != &other) mpfr_swap(value_, other.value_);
  return *this;
}

BigReal::~BigReal() { mpfr_clear(value_); }

std::string BigReal::to_string(int significant_digits) const {
  if (is_nan()) return "nan";
  if (is_inf()) return sign() < 0 ? "-inf" : "inf";
  char* buffer = nullptr;
  const int digits = std::max(1, significant_digits) - 1;
  mpfr_asprintf(&buffer, "%.*Re", digits, value_);
  std::string out(buffer);
  mpfr_free_str(buffer);
  return out;
}

BigReal BigReal::operator-() const { return unary(*this, mpfr_neg); }

BigReal& BigReal::operator+=(const BigReal& rhs) {
  raise_precision(*this, rhs.precision());
  mpfr_add(value_, value_, rhs.value_, kRound);
  return *this;
}

BigReal& BigReal::operator-=(const BigReal& rhs) {
  raise_precision(*this, rhs.precision());
  mpfr_sub(value_, value_, rhs.value_, kRound);
  return *this;
}

BigReal& BigReal::operator*=(const BigReal& rhs) {
  raise_precision(*this, rhs.precision());
  mpfr_mul(value_, value_, rhs.value_, kRound);
  return *this;
}

BigReal& BigReal::operator/=(const BigReal& rhs) {
  raise_precision(*this, rhs.precision());
  mpfr_div(value_, value_, rhs.value_, kRound);
  return *this;
}

BigReal operator+(const BigReal& lhs, double rhs) {
  BigReal out(lhs.precision());
  mpfr_add_d(out.value_, lhs.value_, rhs, kRound);
  return out;
}

BigReal operator-(const BigReal& lhs, double rhs) {
  BigReal out(lhs.precision());
  mpfr_sub_d(out.value_, lhs.value_, rhs, kRound);
  return out;
}

BigReal operator-(double lhs, const BigReal& rhs) {
  BigReal out(rhs.precision());
  mpfr_d_sub(out.value_, lhs, rhs.value_, kRound);
  return out;
}

BigReal operator*(const BigReal& lhs, double rhs) {
  BigReal out(lhs.precision());
  mpfr_mul_d(out.value_, lhs.value_, rhs, kRound);
  return out;
}

BigReal operator/(const BigReal& lhs, double rhs) {
  BigReal out(lhs.precision());
  mpfr_div_d(out.value_, lhs.value_, rhs, kRound);
  return out;
}

BigReal operator/(double lhs, const BigReal& rhs) {
  BigReal out(rhs.precision());
  mpfr_d_div(out.value_, lhs, rhs.value_, kRound);
  return out;
}

std::partial_ordering operator<=>(const BigReal& lhs, const BigReal& rhs) {
  const bool unordered = lhs.is_nan() || rhs.is_nan();
  return from_cmp(unordered ? 0 : mpfr_cmp(lhs.value_, rhs.value_), unordered);
}

std::partial_ordering operator<=>(const BigReal& lhs, double rhs) {
  const bool unordered = lhs.is_nan() || rhs != rhs;
  return from_cmp(unordered ? 0 : mpfr_cmp_d(lhs.value_, rhs), unordered);
}

Context::Context(int precision_bits) : precision_bits_(precision_bits) {
  if (precision_bits < kMinPrecisionBits || precision_bits > (1 << 20)) {
    throw PreconditionError("precision must be between " + std::to_string(kMinPrecisionBits) +
                            " and 1048576 bits, got " + std::to_string(precision_bits));
  }
}

BigReal Context::integer(std::uint64_t value) const {
  BigReal out(precision_bits_);
  mpfr_set_uj(out.get(), value, kRound);
  return out;
}

BigReal Context::parse(std::string_view text) const {
  const std::string owned(text);
  BigReal out(precision_bits_);
  char* end = nullptr;
  mpfr_strtofr(out.get(), owned.c_str(), &end, 10, kRound);
  if (owned.empty() || end == owned.c_str() || *end != '\0' || out.is_nan()) {
    throw PreconditionError("not a number: '" + owned + "'");
  }
  return out;
}

BigReal Context::ln2() const {
  BigReal out(precision_bits_);
  mpfr_const_log2(out.get(), kRound);
  return out;
}

BigReal Context::pi() const {
  BigReal out(precision_bits_);
  mpfr_const_pi(out.get(), kRound);
  return out;
}

BigReal Context::pow2(const BigReal& exponent) const {
  BigReal e = exponent;
  raise_precision(e, precision_bits_);
  return exp2(e);
}

BigReal abs(const BigReal& x) { return unary(x, mpfr_abs); }
BigReal sqrt(const BigReal& x) {
  if (x < 0.0) throw DomainError("sqrt of negative value " + x.to_string(6));
  return unary(x, mpfr_sqrt);
}
BigReal log(const BigReal& x) {
  if (x < 0.0) throw DomainError("log of negative value " + x.to_string(6));
  return unary(x, mpfr_log);
}
BigReal log2(const BigReal& x) {
  if (x < 0.0) throw DomainError("log2 of negative value " + x.to_string(6));
  return unary(x, mpfr_log2);
}
BigReal log10(const BigReal& x) {
  if (x < 0.0) throw DomainError("log10 of negative value " + x.to_string(6));
  return unary(x, mpfr_log10);
}
BigReal exp(const BigReal& x) { return unary(x, mpfr_exp); }
BigReal exp2(const BigReal& x) { return unary(x, mpfr_exp2); }
BigReal erfc(const BigReal& x) { return unary(x, mpfr_erfc); }

BigReal pow(const BigReal& base, const BigReal& exponent) {
  BigReal out(std::max(base.precision(), exponent.precision()));
  mpfr_pow(out.get(), base.get(), exponent.get(), kRound);
  return out;
}

BigReal floor(const BigReal& x) {
  BigReal out(x.precision());
  mpfr_floor(out.get(), x.get());
  return out;
}

BigReal ceil(const BigReal& x) {
  BigReal out(x.precision());
  mpfr_ceil(out.get(), x.get());
  return out;
}

BigReal round(const BigReal& x) {
  BigReal out(x.precision());
  mpfr_round(out.get(), x.get());
  return out;
}

BigReal min(const BigReal& a, const BigReal& b) { return b < a ? b : a; }
BigReal max(const BigReal& a, const BigReal& b) { return a < b ? b : a; }

BigReal log1p(const BigReal& x) {
  if (!(x > -1.0)) throw DomainError("log1p requires x > -1, got " + x.to_string(6));
  return unary(x, mpfr_log1p);
}

BigReal expm1(const BigReal& x) {
  if (x.is_nan()) throw DomainError("expm1 of NaN");
  return unary(x, mpfr_expm1);
}

BigReal lgamma(const BigReal& x) {
  if (!(x > 0.0)) throw DomainError("lgamma requires x > 0, got " + x.to_string(6));
  return unary(x, mpfr_lngamma);
}

BigReal one_minus_pow(const BigReal& f, const BigReal& m) {
  if (!(f >= 0.0) || !(f <= 1.0)) {
    throw DomainError("one_minus_pow requires 0 <= f <= 1, got " + f.to_string(6));
  }
  if (!(m >= 0.0)) throw DomainError("one_minus_pow requires exponent >= 0, got " + m.to_string(6));
  const int precision = std::max(f.precision(), m.precision());
  if (m.is_zero() || f.is_zero()) return BigReal(0.0, precision);
  if (f == 1.0) return BigReal(1.0, precision);
  return -expm1(m * log1p(-f));
}

namespace {

bool near_integer(const BigReal& x, const BigReal& nearest) {
  BigReal tolerance = max(abs(x), BigReal(1.0, x.precision()));
  mpfr_mul_2si(tolerance.get(), tolerance.get(), 8 - x.precision(), kRound);
  return abs(x - nearest) <= tolerance;
}

}  // namespace

BigReal snapped_ceil(const BigReal& x) {
  BigReal nearest = round(x);
  return near_integer(x, nearest) ? nearest : ceil(x);
}

BigReal snapped_floor(const BigReal& x) {
  BigReal nearest = round(x);
  return near_integer(x, nearest) ? nearest : floor(x);
}

}  // namespace biosec
