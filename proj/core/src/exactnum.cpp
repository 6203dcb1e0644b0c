#include "tracelap/exactnum.hpp"

#include <algorithm>
#include <cctype>

#include "tracelap/errors.hpp"

namespace tracelap {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

Int parse_integer(std::string_view text, std::string_view whole) {
  std::string_view digits = text;
  bool negative = false;
  if (!digits.empty() && (digits.front() == '+' || digits.front() == '-')) {
    negative = digits.front() == '-';
    digits.remove_prefix(1);
  }
  if (!all_digits(digits)) throw ParseError("not a rational number: '" + std::string(whole) + "'");
  Int value(std::string(digits), 10);
  return negative ? Int(-value) : value;
}

Rational parse_decimal(std::string_view text) {
  std::string_view mantissa = text;
  long exponent10 = 0;
  if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    const Int e_value = parse_integer(text.substr(e + 1), text);
    if (!e_value.fits_slong_p() || abs(e_value) > 100000) throw ParseError("exponent out of range: '" + std::string(text) + "'");
    exponent10 = e_value.get_si();
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '+' || mantissa.front() == '-')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  long fraction_digits = 0;
  if (const auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    const auto int_part = mantissa.substr(0, dot);
    const auto frac_part = mantissa.substr(dot + 1);
    if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
        (!frac_part.empty() && !all_digits(frac_part))) {
      throw ParseError("not a rational number: '" + std::string(text) + "'");
    }
    digits = std::string(int_part) + std::string(frac_part);
    fraction_digits = static_cast<long>(frac_part.size());
  } else {
    if (!all_digits(mantissa)) throw ParseError("not a rational number: '" + std::string(text) + "'");
    digits = std::string(mantissa);
  }
  Rational q{Int(digits, 10)};
  const long shift = exponent10 - fraction_digits;
  Int ten_power;
  mpz_ui_pow_ui(ten_power.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  if (shift >= 0) {
    q *= ten_power;
  } else {
    q /= ten_power;
  }
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw ParseError("empty rational");
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const Int num = parse_integer(text.substr(0, slash), text);
    const Int den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) throw ParseError("zero denominator: '" + std::string(text) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  if (text.find_first_of(".eE") != std::string_view::npos) return parse_decimal(text);
  return Rational(parse_integer(text, text));
}

std::string to_string(const Rational& q) { return q.get_str(10); }

std::string to_string(const GaussianRational& z) {
  if (z.im == 0) return to_string(z.re);
  return "{" + to_string(z.re) + ", " + to_string(z.im) + "}";
}

HPReal abs(const HPComplex& z) {
  HPReal out(std::max(z.re.precision(), z.im.precision()));
  mpfr_hypot(out.get(), z.re.get(), z.im.get(), MPFR_RNDN);
  return out;
}

HPReal Number::to_hp(Precision prec) const {
  if (is_exact()) return HPReal(exact(), prec);
  return approx();
}

int Number::sign() const { return is_exact() ? sgn(exact()) : approx().sign(); }

std::string Number::to_string() const { return is_exact() ? tracelap::to_string(exact()) : approx().to_string(); }

bool operator==(const Number& a, const Number& b) { return (a <=> b) == 0; }

std::partial_ordering operator<=>(const Number& a, const Number& b) {
  if (a.is_exact() && b.is_exact()) {
    const int c = cmp(a.exact(), b.exact());
    return c < 0 ? std::partial_ordering::less : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
  }
  // Compare a float against an exact value through the float's exact binary value.
  const Rational qa = a.is_exact() ? a.exact() : a.approx().to_rational();
  const Rational qb = b.is_exact() ? b.exact() : b.approx().to_rational();
  const int c = cmp(qa, qb);
  return c < 0 ? std::partial_ordering::less : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
}

HPReal Log2Multiple::value(Precision prec) const {
  return (HPReal(coefficient, prec + 32) * const_ln2(prec + 32)).with_precision(prec);
}

Number exp_pow2(const Rational& e, Precision prec) {
  if (e.get_den() == 1) {
    const Int& k = e.get_num();
    if (!k.fits_slong_p() || abs(k) > (1L << 26)) throw RangeError("2^e with |e| too large: " + to_string(e));
    Int power;
    mpz_ui_pow_ui(power.get_mpz_t(), 2, Int(abs(k)).get_ui());
    if (k >= 0) return Rational(power);
    Rational inverse(Int(1), power);
    inverse.canonicalize();
    return inverse;
  }
  HPReal x(e, prec + 32);
  HPReal out(prec);
  mpfr_exp2(out.get(), x.get(), MPFR_RNDN);
  if (!out.is_finite()) throw RangeError("2^e overflow for e = " + to_string(e));
  return out;
}

HPReal hp_exp(const HPReal& x) { return exp(x); }

HPComplex hp_exp(const HPComplex& z) {
  const HPReal scale = exp(z.re);
  if (z.im.is_zero()) return {scale, HPReal(scale.precision())};
  return {scale * cos(z.im), scale * sin(z.im)};
}

}  // namespace tracelap
