#pragma once

#include <span>
#include <string>
#include <vector>

#include "tracelap/divdiff.hpp"
#include "tracelap/linalg.hpp"

namespace tracelap {

/// Caps on the n^p loop sum.
struct TraceLimits {
  int max_order = 8;
  std::size_t max_dim = 8;
};

/// d^p/dt^p tr f(x + t h) at t = 0 for x = diag(lambda):
/// p! sum h_{i1 i2} ... h_{ip i1} [lambda_i1, ..., lambda_ip, lambda_i1]_f.
/// Divided differences are shared between index tuples with the same multiset.
template <class Real>
Real trace_derivative(const EigenFrame<Real>& frame, const FunctionSpec& f, int p,
                      Precision prec = default_precision(), const TraceLimits& limits = {});

/// Exact when the frame is exact and f has no exponential part.
Number trace_derivative(const AnyFrame& frame, const FunctionSpec& f, int p, Precision prec = default_precision(),
                        const TraceLimits& limits = {});

/// Same derivative written with the other index ordering:
/// p! sum h_{ip ip-1} ... h_{i2 i1} h_{i1 ip} [lambda_i1, ..., lambda_ip, lambda_ip]_f.
template <class Real>
Real trace_derivative_theorem_order(const EigenFrame<Real>& frame, const FunctionSpec& f, int p,
                                    Precision prec = default_precision(), const TraceLimits& limits = {});

/// Loop sum for f(t) = exp(sigma t) with Opitz divided differences.
HPReal trace_derivative_exp(const FloatFrame& frame, const Rational& sigma, int p,
                            Precision prec = default_precision(), const TraceLimits& limits = {});

/// Central finite differences of t -> tr f(A + tB) around t0, step 2^(-prec/(p+2)).
HPReal trace_derivative_fd(const FloatHermitian& a, const FloatHermitian& b, const FunctionSpec& f, int p,
                           const HPReal& t0, Precision prec = default_precision());

/// Frame of x + t0 h, with h rewritten in the new eigenbasis.
FloatFrame shift_frame(const AnyFrame& frame, const Rational& t0, Precision prec = default_precision());

/// Float values with |v| at or below this count as zero.
HPReal sign_tolerance(Precision prec);
int classify_sign(const Number& value, Precision prec);

struct DerivativeEntry {
  Rational t0;
  int p = 0;
  Number value;  ///< (-1)^p times the p-th derivative at t0
  int sign = 0;
  bool certified = false;
  std::string method;
};

struct DerivativeReport {
  std::string function;
  std::vector<DerivativeEntry> entries;
  HPReal tolerance;

  /// Every entry classified as + or 0.
  bool alternates() const;
};

DerivativeReport complete_monotonicity_report(const AnyHermitian& a, const AnyHermitian& b, const FunctionSpec& f,
                                              int max_order, std::span<const Rational> t_grid,
                                              Precision prec = default_precision(),
                                              const TraceLimits& limits = {});

}  // namespace tracelap
