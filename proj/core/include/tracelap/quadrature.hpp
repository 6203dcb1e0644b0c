#pragma once

#include <functional>
#include <span>
#include <vector>

#include "tracelap/hpreal.hpp"
#include "tracelap/linalg.hpp"

namespace tracelap {

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussLegendreRule {
  std::vector<HPReal> nodes;
  std::vector<HPReal> weights;
};

/// Cached per (points, precision); safe to call from several threads.
const GaussLegendreRule& gauss_legendre(int points, Precision prec);

/// S(i, j) = integral over [0, s_i] of the j-th Lagrange basis polynomial on
/// the Gauss-Legendre nodes s.  Cached like gauss_legendre.
const Matrix<HPReal>& integration_matrix(int points, Precision prec);

HPReal integrate(const std::function<HPReal(const HPReal&)>& g, const HPReal& a, const HPReal& b, int points,
                 Precision prec);

/// Integral over 1 >= t_1 >= ... >= t_n >= 0 of g_1(t_1) ... g_n(t_n), using
/// the spectral integration matrix for the inner integrals.
HPReal separable_simplex_integral(std::span<const std::function<HPReal(const HPReal&)>> factors, int points,
                                  Precision prec);

/// Integral over the same simplex of a general integrand by nested
/// Gauss-Legendre, points^n evaluations.  Throws RangeError above max_evaluations.
HPReal nested_simplex_integral(int n, const std::function<HPReal(std::span<const HPReal>)>& integrand, int points,
                               Precision prec, double max_evaluations = 2e7);

}  // namespace tracelap
