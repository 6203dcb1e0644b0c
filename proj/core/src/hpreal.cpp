#include "tracelap/hpreal.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <string>

#include "tracelap/errors.hpp"

namespace tracelap {

Precision default_precision() {
  static const Precision cached = [] {
    if (const char* env = std::getenv("TRACELAP_PRECISION")) {
      char* end = nullptr;
      const unsigned long bits = std::strtoul(env, &end, 10);
      if (end != env && *end == '\0' && bits >= kMinPrecision && bits <= (1UL << 20)) {
        return static_cast<Precision>(bits);
      }
    }
    return kDefaultPrecision;
  }();
  return cached;
}

namespace {

Precision widest(const HPReal& a, const HPReal& b) { return std::max(a.precision(), b.precision()); }

}  // namespace

HPReal::HPReal() : HPReal(default_precision()) {}

HPReal::HPReal(Precision prec) {
  mpfr_init2(value_, static_cast<mpfr_prec_t>(std::max(prec, Precision{MPFR_PREC_MIN})));
  mpfr_set_zero(value_, 1);
}

HPReal::HPReal(int value) : HPReal(static_cast<long>(value)) {}

HPReal::HPReal(long value) : HPReal(value, default_precision()) {}

HPReal::HPReal(long long value) : HPReal(static_cast<long>(value)) {}

HPReal::HPReal(long value, Precision prec) : HPReal(prec) { mpfr_set_si(value_, value, MPFR_RNDN); }

HPReal::HPReal(double value, Precision prec) : HPReal(prec) { mpfr_set_d(value_, value, MPFR_RNDN); }

HPReal::HPReal(const mpq_class& value, Precision prec) : HPReal(prec) {
  mpfr_set_q(value_, value.get_mpq_t(), MPFR_RNDN);
}

HPReal::HPReal(const mpz_class& value, Precision prec) : HPReal(prec) {
  mpfr_set_z(value_, value.get_mpz_t(), MPFR_RNDN);
}

HPReal::HPReal(std::string_view decimal, Precision prec) : HPReal(prec) {
  const std::string text(decimal);
  char* end = nullptr;
  if (!text.empty()) mpfr_strtofr(value_, text.c_str(), &end, 10, MPFR_RNDN);
  if (text.empty() || end == text.c_str() || *end != '\0') {
    throw ParseError("not a decimal number: '" + text + "'");
  }
}

HPReal::HPReal(const HPReal& other) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

HPReal::HPReal(HPReal&& other) noexcept {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_swap(value_, other.value_);
}

HPReal& HPReal::operator=(const HPReal& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

HPReal& HPReal::operator=(HPReal&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

HPReal::~HPReal() { mpfr_clear(value_); }

HPReal HPReal::with_precision(Precision prec) const {
  HPReal out(prec);
  mpfr_set(out.value_, value_, MPFR_RNDN);
  return out;
}

mpq_class HPReal::to_rational() const {
  if (!is_finite()) throw RangeError("non-finite value has no rational form");
  mpz_class mantissa;
  const mpfr_exp_t e = mpfr_get_z_2exp(mantissa.get_mpz_t(), value_);
  mpq_class q(mantissa);
  if (e >= 0) {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  }
  return q;
}

long HPReal::exponent() const {
  if (is_zero()) return mpfr_get_emin();
  return static_cast<long>(mpfr_get_exp(value_));
}

std::string HPReal::to_string(int digits) const {
  if (!is_finite()) {
    if (mpfr_nan_p(value_)) return "nan";
    return sign() < 0 ? "-inf" : "inf";
  }
  if (digits <= 0) digits = static_cast<int>(precision() * 0.30103) + 2;
  char* buffer = nullptr;
  mpfr_asprintf(&buffer, "%.*Re", digits - 1, value_);
  std::string out(buffer);
  mpfr_free_str(buffer);
  return out;
}

HPReal& HPReal::operator+=(const HPReal& rhs) { return *this = *this + rhs; }
HPReal& HPReal::operator-=(const HPReal& rhs) { return *this = *this - rhs; }
HPReal& HPReal::operator*=(const HPReal& rhs) { return *this = *this * rhs; }
HPReal& HPReal::operator/=(const HPReal& rhs) { return *this = *this / rhs; }

HPReal operator+(const HPReal& a, const HPReal& b) {
  HPReal out(widest(a, b));
  mpfr_add(out.value_, a.value_, b.value_, MPFR_RNDN);
  return out;
}

HPReal operator-(const HPReal& a, const HPReal& b) {
  HPReal out(widest(a, b));
  mpfr_sub(out.value_, a.value_, b.value_, MPFR_RNDN);
  return out;
}

HPReal operator*(const HPReal& a, const HPReal& b) {
  HPReal out(widest(a, b));
  mpfr_mul(out.value_, a.value_, b.value_, MPFR_RNDN);
  return out;
}

HPReal operator/(const HPReal& a, const HPReal& b) {
  HPReal out(widest(a, b));
  mpfr_div(out.value_, a.value_, b.value_, MPFR_RNDN);
  return out;
}

HPReal operator-(const HPReal& a) {
  HPReal out(a.precision());
  mpfr_neg(out.value_, a.value_, MPFR_RNDN);
  return out;
}

std::partial_ordering operator<=>(const HPReal& a, const HPReal& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.value_, b.value_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

std::ostream& operator<<(std::ostream& os, const HPReal& x) { return os << x.to_string(); }

HPReal abs(const HPReal& x) {
  HPReal out(x.precision());
  mpfr_abs(out.get(), x.get(), MPFR_RNDN);
  return out;
}

HPReal sqrt(const HPReal& x) {
  if (x.sign() < 0) throw DomainError("square root of a negative number");
  HPReal out(x.precision());
  mpfr_sqrt(out.get(), x.get(), MPFR_RNDN);
  return out;
}

HPReal exp(const HPReal& x) {
  if (!x.is_finite()) throw RangeError("exp of a non-finite value");
  HPReal out(x.precision());
  mpfr_clear_overflow();
  mpfr_exp(out.get(), x.get(), MPFR_RNDN);
  if (mpfr_overflow_p() || !out.is_finite()) {
    mpfr_clear_overflow();
    throw RangeError("exp overflow at argument " + x.to_string(12));
  }
  return out;
}

HPReal log(const HPReal& x) {
  if (x.sign() <= 0) throw DomainError("log of a non-positive number");
  HPReal out(x.precision());
  mpfr_log(out.get(), x.get(), MPFR_RNDN);
  return out;
}

HPReal sin(const HPReal& x) {
  HPReal out(x.precision());
  mpfr_sin(out.get(), x.get(), MPFR_RNDN);
  return out;
}

HPReal cos(const HPReal& x) {
  HPReal out(x.precision());
  mpfr_cos(out.get(), x.get(), MPFR_RNDN);
  return out;
}

HPReal pow(const HPReal& x, long n) {
  HPReal out(x.precision());
  mpfr_pow_si(out.get(), x.get(), n, MPFR_RNDN);
  return out;
}

HPReal ldexp(const HPReal& x, long e) {
  HPReal out(x.precision());
  mpfr_mul_2si(out.get(), x.get(), e, MPFR_RNDN);
  return out;
}

HPReal max(const HPReal& a, const HPReal& b) { return a < b ? b : a; }
HPReal min(const HPReal& a, const HPReal& b) { return b < a ? b : a; }

HPReal const_pi(Precision prec) {
  HPReal out(prec);
  mpfr_const_pi(out.get(), MPFR_RNDN);
  return out;
}

HPReal const_ln2(Precision prec) {
  HPReal out(prec);
  mpfr_const_log2(out.get(), MPFR_RNDN);
  return out;
}

HPReal pow2(long e, Precision prec) {
  HPReal out(prec);
  mpfr_set_ui_2exp(out.get(), 1, e, MPFR_RNDN);
  return out;
}

}  // namespace tracelap
