#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include <gmpxx.h>

#include "tracelap/hpreal.hpp"

namespace tracelap {

/// Arbitrary precision integer.
using Int = mpz_class;
/// Arbitrary precision rational, kept in lowest terms with a positive denominator.
using Rational = mpq_class;

inline Rational conj(const Rational& x) { return x; }
inline Rational real_part(const Rational& x) { return x; }

/// Parses "p", "p/q", or a finite decimal such as "-1.25" or "3e-2" into an exact rational.
Rational parse_rational(std::string_view text);
/// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& q);

/// Complex number over an ordered real field (Rational or HPReal).
template <class Real>
struct Complex {
  Real re{};
  Real im{};

  Complex() = default;
  Complex(Real r) : re(std::move(r)), im() {}  // NOLINT: reals embed in the complex numbers
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  Complex(int r) : re(r), im() {}  // NOLINT

  bool is_real() const { return im == 0; }
  bool is_zero() const { return re == 0 && im == 0; }
  /// |z|^2
  Real norm() const { return Real(re * re + im * im); }

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) { return *this = *this * o; }
  Complex& operator/=(const Complex& o) { return *this = *this / o; }

  friend Complex operator+(const Complex& a, const Complex& b) { return {Real(a.re + b.re), Real(a.im + b.im)}; }
  friend Complex operator-(const Complex& a, const Complex& b) { return {Real(a.re - b.re), Real(a.im - b.im)}; }
  friend Complex operator-(const Complex& a) { return {Real(-a.re), Real(-a.im)}; }
  friend Complex operator*(const Complex& a, const Complex& b) {
    if (b.im == 0) return {Real(a.re * b.re), Real(a.im * b.re)};
    if (a.im == 0) return {Real(a.re * b.re), Real(a.re * b.im)};
    return {Real(a.re * b.re - a.im * b.im), Real(a.re * b.im + a.im * b.re)};
  }
  friend Complex operator/(const Complex& a, const Complex& b) {
    if (b.im == 0) return {Real(a.re / b.re), Real(a.im / b.re)};
    const Real d = b.norm();
    return {Real((a.re * b.re + a.im * b.im) / d), Real((a.im * b.re - a.re * b.im) / d)};
  }
  friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
};

template <class Real>
Complex<Real> conj(const Complex<Real>& z) {
  return {z.re, Real(-z.im)};
}

template <class Real>
Real real_part(const Complex<Real>& z) {
  return z.re;
}

using GaussianRational = Complex<Rational>;
using HPComplex = Complex<HPReal>;

/// |z| for a high-precision complex value.
HPReal abs(const HPComplex& z);
/// Magnitude used by generic norm estimates.
inline HPReal magnitude(const HPReal& x) { return abs(x); }
inline HPReal magnitude(const HPComplex& z) { return abs(z); }

std::string to_string(const GaussianRational& z);

inline HPReal at_precision(const HPReal& x, Precision prec) { return x.with_precision(prec); }
inline HPComplex at_precision(const HPComplex& z, Precision prec) {
  return {z.re.with_precision(prec), z.im.with_precision(prec)};
}
inline HPComplex to_hp(const GaussianRational& z, Precision prec) { return {HPReal(z.re, prec), HPReal(z.im, prec)}; }

enum class Mode { Exact, Float };

inline const char* to_string(Mode mode) { return mode == Mode::Exact ? "exact" : "float"; }

/// Compile-time facts about the two real fields used throughout the library.
template <class Real>
struct RealTraits;

template <>
struct RealTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr Mode mode = Mode::Exact;
  static Rational from_rational(const Rational& q, Precision) { return q; }
};

template <>
struct RealTraits<HPReal> {
  static constexpr bool exact = false;
  static constexpr Mode mode = Mode::Float;
  static HPReal from_rational(const Rational& q, Precision prec) { return HPReal(q, prec); }
};

template <class Real>
Real from_rational(const Rational& q, Precision prec) {
  return RealTraits<Real>::from_rational(q, prec);
}

/// A real number that is either exact or a high-precision approximation.
class Number {
 public:
  Number() : value_(Rational(0)) {}
  Number(Rational q) : value_(std::move(q)) {}  // NOLINT
  Number(HPReal x) : value_(std::move(x)) {}    // NOLINT

  bool is_exact() const { return std::holds_alternative<Rational>(value_); }
  Mode mode() const { return is_exact() ? Mode::Exact : Mode::Float; }
  const Rational& exact() const { return std::get<Rational>(value_); }
  const HPReal& approx() const { return std::get<HPReal>(value_); }
  /// Value as a float at `prec` bits (exact values are rounded once).
  HPReal to_hp(Precision prec) const;
  int sign() const;
  /// Exact rational text or scientific decimal.
  std::string to_string() const;

  friend bool operator==(const Number& a, const Number& b);
  friend std::partial_ordering operator<=>(const Number& a, const Number& b);

 private:
  std::variant<Rational, HPReal> value_;
};

/// A real number stored as coefficient * ln 2, so that exp of it is 2^coefficient.
struct Log2Multiple {
  Rational coefficient;

  /// coefficient * ln 2 at `prec` bits.
  HPReal value(Precision prec) const;
  friend bool operator==(const Log2Multiple&, const Log2Multiple&) = default;
};

/// 2^e: exact when e is an integer, otherwise a float at `prec` bits.
Number exp_pow2(const Rational& e, Precision prec = default_precision());

/// exp for high-precision reals and complexes; range errors throw RangeError.
HPReal hp_exp(const HPReal& x);
HPComplex hp_exp(const HPComplex& z);

}  // namespace tracelap
