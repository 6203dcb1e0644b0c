#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tracelap/linalg.hpp"

namespace tracelap {

/// Vectors a_1..a_n with (a_i | a_j) = sum_m w_m a_im conj(a_jm).  Weights
/// default to one; exact Gram factorizations keep the LDL* pivots here so
/// that loop products stay rational.
template <class Real>
struct VectorFamily {
  std::vector<std::vector<Complex<Real>>> vectors;
  std::vector<Real> weights;

  std::size_t size() const { return vectors.size(); }
  std::size_t dim() const { return vectors.empty() ? 0 : vectors.front().size(); }
  /// Throws DomainError on an empty family or ragged vectors.
  void validate() const;
  Complex<Real> inner(std::size_t i, std::size_t j) const;
  Matrix<Complex<Real>> gram() const;

  static VectorFamily from_gram(const GramRows<Real>& rows);
};

using ExactFamily = VectorFamily<Rational>;
using FloatFamily = VectorFamily<HPReal>;

FloatFamily to_float(const ExactFamily& family, Precision prec);

/// prod_k (a_{i_k} | a_{i_{k+1}}) with wraparound; indices are 0-based.
template <class Real>
Complex<Real> loop_value(const VectorFamily<Real>& family, std::span<const std::size_t> indices);

/// Loop through 0, 1, ..., n-1.
template <class Real>
Complex<Real> canonical_loop(const VectorFamily<Real>& family);

/// -cos^p(pi/p)
HPReal loop_bound(int p, Precision prec = default_precision());

/// p unit vectors in the plane at angles k pi / p.
FloatFamily fan_family(int p, Precision prec = default_precision());

struct LoopSearchResult {
  FloatFamily family;
  HPReal value;       ///< canonical loop of `family`, recomputed at full precision
  int best_restart = -1;
  int restarts = 0;
};

/// Projected gradient descent in double precision over p unit vectors in
/// R^d, restarted from seeded random points.  The best family is normalized
/// and evaluated again at `prec` bits.
LoopSearchResult loop_min_search(int p, int d, int restarts, std::uint64_t seed,
                                 Precision prec = default_precision());

/// 0 <= t3 <= t2 <= t1 <= 1
struct IntegrandPoint {
  Rational t1;
  Rational t2;
  Rational t3;

  void validate() const;
};

struct IntegrandValue {
  Number value;
  /// "exact" when every exponent is an integer multiple of ln 2.
  Mode mode = Mode::Exact;
};

/// sum_{p,i,j} (a_p|a_i)(a_i|a_j)(a_j|a_p) exp((1-(t1-t3)) l_p + (t1-t2) l_i + (t2-t3) l_j),
/// real part.
IntegrandValue triple_integrand(const ExactFamily& family, std::span<const Log2Multiple> lambda,
                                const IntegrandPoint& point, Precision prec = default_precision());
/// Float version with arbitrary real exponents and point.
HPReal triple_integrand(const FloatFamily& family, std::span<const HPReal> lambda, const HPReal& t1, const HPReal& t2,
                        const HPReal& t3, Precision prec = default_precision());

struct ThirdDerivativeValue {
  HPReal closed_form;  ///< -(1/3!) d^3/dt^3 tr exp(x - th) at 0 by the loop sum
  HPReal quadrature;   ///< simplex integral of the triple integrand
  HPReal gap;
};

ThirdDerivativeValue third_derivative_value(const ExactFamily& family, std::span<const Log2Multiple> lambda,
                                            Precision prec = default_precision(), int quad_points = 96);

enum class ExampleVariant { Original, Modified };

/// The integer-vector example: a_1 = (1000, -10, 1), a_2 = (-10, 10000, 1000),
/// a_3 = (1, 1000, 202139), or 202138 for the modified variant.
ExactFamily bmv_example_family(ExampleVariant variant);
std::vector<Log2Multiple> bmv_example_lambda();
IntegrandPoint bmv_example_point();
/// triple_integrand on the example inputs.
IntegrandValue bmv_example(ExampleVariant variant, Precision prec = default_precision());

}  // namespace tracelap
