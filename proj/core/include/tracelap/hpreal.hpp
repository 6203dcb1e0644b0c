#pragma once

#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace tracelap {

/// Working precision in bits.
using Precision = unsigned;

inline constexpr Precision kDefaultPrecision = 256;
inline constexpr Precision kMinPrecision = 64;

/// Precision used when a caller does not pass one explicitly.  Reads the
/// TRACELAP_PRECISION environment variable once; falls back to 256 bits.
Precision default_precision();

/// Multiprecision binary floating point value backed by MPFR.
///
/// Every value carries its own precision.  Binary operations round to the
/// larger precision of the two operands, so mixing a 256-bit zero with a
/// 512-bit value yields a 512-bit result.
class HPReal {
 public:
  HPReal();
  explicit HPReal(Precision prec);
  HPReal(int value);   // NOLINT: implicit by design of the numeric tower
  HPReal(long value);  // NOLINT
  HPReal(long long value);  // NOLINT
  HPReal(long value, Precision prec);
  HPReal(double value, Precision prec);
  HPReal(const mpq_class& value, Precision prec);
  HPReal(const mpz_class& value, Precision prec);
  HPReal(std::string_view decimal, Precision prec);

  HPReal(const HPReal& other);
  HPReal(HPReal&& other) noexcept;
  HPReal& operator=(const HPReal& other);
  HPReal& operator=(HPReal&& other) noexcept;
  ~HPReal();

  Precision precision() const { return static_cast<Precision>(mpfr_get_prec(value_)); }
  /// Copy of this value rounded (or exactly widened) to `prec` bits.
  HPReal with_precision(Precision prec) const;

  mpfr_srcptr get() const { return value_; }
  mpfr_ptr get() { return value_; }

  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const { return mpfr_number_p(value_) != 0; }
  int sign() const { return mpfr_sgn(value_); }
  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  /// Exact rational value of the binary float.
  mpq_class to_rational() const;
  /// Base-2 exponent e with 0.5 <= |x| / 2^e < 1; very negative for zero.
  long exponent() const;

  /// Scientific decimal with `digits` significant digits (0 = enough for round trip).
  std::string to_string(int digits = 0) const;

  HPReal& operator+=(const HPReal& rhs);
  HPReal& operator-=(const HPReal& rhs);
  HPReal& operator*=(const HPReal& rhs);
  HPReal& operator/=(const HPReal& rhs);

  friend HPReal operator+(const HPReal& a, const HPReal& b);
  friend HPReal operator-(const HPReal& a, const HPReal& b);
  friend HPReal operator*(const HPReal& a, const HPReal& b);
  friend HPReal operator/(const HPReal& a, const HPReal& b);
  friend HPReal operator-(const HPReal& a);

  friend bool operator==(const HPReal& a, const HPReal& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }
  friend std::partial_ordering operator<=>(const HPReal& a, const HPReal& b);

 private:
  mpfr_t value_;
};

std::ostream& operator<<(std::ostream& os, const HPReal& x);

HPReal abs(const HPReal& x);
HPReal sqrt(const HPReal& x);
/// Natural exponential; throws RangeError when the result overflows.
HPReal exp(const HPReal& x);
HPReal log(const HPReal& x);
HPReal sin(const HPReal& x);
HPReal cos(const HPReal& x);
HPReal pow(const HPReal& x, long n);
/// x * 2^e, exact.
HPReal ldexp(const HPReal& x, long e);
HPReal max(const HPReal& a, const HPReal& b);
HPReal min(const HPReal& a, const HPReal& b);

HPReal const_pi(Precision prec);
HPReal const_ln2(Precision prec);
/// 2^e rounded to `prec` bits.
HPReal pow2(long e, Precision prec);

inline HPReal conj(const HPReal& x) { return x; }
inline HPReal real_part(const HPReal& x) { return x; }

}  // namespace tracelap
