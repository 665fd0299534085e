#pragma once

// Extended-precision real arithmetic built on MPFR.
//
// Every BigReal carries its own binary precision. Values are created through a
// Context, which fixes the precision for one computation; results of binary
// operations take the larger precision of their operands. There is no global
// precision state.

#include <cstdint>

#include <mpfr.h>

#include <compare>
#include <string>
#include <string_view>

namespace biosec {

inline constexpr int kDefaultPrecisionBits = 256;
inline constexpr int kMinPrecisionBits = 64;

class BigReal {
 public:
  explicit BigReal(int precision_bits = kDefaultPrecisionBits);
  BigReal(double value, int precision_bits);
  BigReal(const BigReal& other);
  BigReal(BigReal&& other) noexcept;
  BigReal& operator=(const BigReal& other);
  BigReal& operator=(BigReal&& other) noexcept;
  ~BigReal();

  int precision() const { return static_cast<int>(mpfr_get_prec(value_)); }

  mpfr_srcptr get() const { return value_; }
  mpfr_ptr get() { return value_; }

  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  long double to_long_double() const { return mpfr_get_ld(value_, MPFR_RNDN); }
  /// Scientific notation with `significant_digits` digits, e.g. "1.3352e-35".
  std::string to_string(int significant_digits = 17) const;

  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const { return mpfr_number_p(value_) != 0; }
  bool is_inf() const { return mpfr_inf_p(value_) != 0; }
  bool is_nan() const { return mpfr_nan_p(value_) != 0; }
  bool is_integer() const { return mpfr_integer_p(value_) != 0; }
  int sign() const { return mpfr_sgn(value_); }

  BigReal operator-() const;
  BigReal& operator+=(const BigReal& rhs);
  BigReal& operator-=(const BigReal& rhs);
  BigReal& operator*=(const BigReal& rhs);
  BigReal& operator/=(const BigReal& rhs);

  friend BigReal operator+(BigReal lhs, const BigReal& rhs) { return lhs += rhs; }
  friend BigReal operator-(BigReal lhs, const BigReal& rhs) { return lhs -= rhs; }
  friend BigReal operator*(BigReal lhs, const BigReal& rhs) { return lhs *= rhs; }
  friend BigReal operator/(BigReal lhs, const BigReal& rhs) { return lhs /= rhs; }

  friend BigReal operator+(const BigReal& lhs, double rhs);
  friend BigReal operator-(const BigReal& lhs, double rhs);
  friend BigReal operator-(double lhs, const BigReal& rhs);
  friend BigReal operator+(double lhs, const BigReal& rhs) { return rhs + lhs; }
  friend BigReal operator*(const BigReal& lhs, double rhs);
  friend BigReal operator*(double lhs, const BigReal& rhs) { return rhs * lhs; }
  friend BigReal operator/(const BigReal& lhs, double rhs);
  friend BigReal operator/(double lhs, const BigReal& rhs);

  friend bool operator==(const BigReal& lhs, const BigReal& rhs) {
    return mpfr_equal_p(lhs.value_, rhs.value_) != 0;
  }
  friend std::partial_ordering operator<=>(const BigReal& lhs, const BigReal& rhs);
  friend bool operator==(const BigReal& lhs, double rhs) { return mpfr_cmp_d(lhs.value_, rhs) == 0; }
  friend std::partial_ordering operator<=>(const BigReal& lhs, double rhs);

 private:
  mpfr_t value_;
};

/// Fixes the working precision of one computation. Cheap to copy.
class Context {
 public:
  explicit Context(int precision_bits = kDefaultPrecisionBits);

  int precision_bits() const { return precision_bits_; }

  BigReal real(double value) const { return BigReal(value, precision_bits_); }
  BigReal integer(std::uint64_t value) const;
  /// Parses a decimal literal ("1e-30", "0.05", "inf") exactly rounded to the context precision.
  BigReal parse(std::string_view text) const;
  BigReal zero() const { return real(0.0); }
  BigReal one() const { return real(1.0); }
  BigReal ln2() const;
  BigReal pi() const;
  /// 2^exponent for a (possibly fractional) exponent.
  BigReal pow2(const BigReal& exponent) const;

 private:
  int precision_bits_;
};

// Elementary functions; results carry the precision of the argument.
BigReal abs(const BigReal& x);
BigReal sqrt(const BigReal& x);
BigReal log(const BigReal& x);
BigReal log2(const BigReal& x);
BigReal log10(const BigReal& x);
BigReal exp(const BigReal& x);
BigReal exp2(const BigReal& x);
BigReal pow(const BigReal& base, const BigReal& exponent);
BigReal floor(const BigReal& x);
BigReal ceil(const BigReal& x);
BigReal round(const BigReal& x);
BigReal erfc(const BigReal& x);
BigReal min(const BigReal& a, const BigReal& b);
BigReal max(const BigReal& a, const BigReal& b);

/// ln(1+x). Throws DomainError for x <= -1.
BigReal log1p(const BigReal& x);
/// e^x - 1.
BigReal expm1(const BigReal& x);
/// ln Gamma(x). Throws DomainError for x <= 0.
BigReal lgamma(const BigReal& x);

/// 1 - (1 - f)^m evaluated as -expm1(m * log1p(-f)).
///
/// Requires 0 <= f <= 1 and m >= 0; the result lies in [0, 1] and is
/// nondecreasing in both arguments.
BigReal one_minus_pow(const BigReal& f, const BigReal& m);

/// Rounds `x` to the nearest integer when it lies within a few ulps of one,
/// otherwise applies ceil. Used where an exact integer ratio would otherwise
/// round to the wrong side of an integer boundary.
BigReal snapped_ceil(const BigReal& x);
/// Floor counterpart of snapped_ceil.
BigReal snapped_floor(const BigReal& x);

}  // namespace biosec
