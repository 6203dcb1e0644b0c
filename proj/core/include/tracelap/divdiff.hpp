#pragma once

#include <span>
#include <vector>

#include "tracelap/exactnum.hpp"
#include "tracelap/function_spec.hpp"

namespace tracelap {

/// Newton table over the sorted nodes: entry(i, j) = [x_i, ..., x_j]_f.
template <class Real>
struct DivDiffTable {
  std::vector<Real> nodes;
  std::vector<std::vector<Real>> columns;  ///< columns[k][i] = [x_i, ..., x_{i+k}]

  const Real& operator()(std::size_t i, std::size_t j) const { return columns[j - i][i]; }
  const Real& top() const { return columns.back().front(); }
};

/// Full table.  Repeated nodes use f^(m)(x)/m! on each run of m+1 equal nodes.
template <class Real>
DivDiffTable<Real> divdiff_table(const FunctionSpec& f, std::span<const Real> nodes,
                                 Precision prec = default_precision());

/// Divided difference of order nodes.size() - 1.  Exact mode needs an
/// exponential-free f; float mode routes near-confluent nodes through the
/// Opitz method (exp) or the product formula (resolvent sums).
template <class Real>
Real divided_difference(const FunctionSpec& f, std::span<const Real> nodes, Precision prec = default_precision());

/// Exact when f allows it and mode is Exact, float otherwise.
Number divided_difference(const FunctionSpec& f, std::span<const Rational> nodes, Mode preferred,
                          Precision prec = default_precision());

/// (-1)^(p-1) prod 1/(c + x_i).  Throws DomainError at a pole.
template <class Real>
Real divdiff_resolvent_product(const Rational& c, std::span<const Real> nodes, Precision prec = default_precision());

/// Corner entry of exp(sigma J) with J bidiagonal: nodes on the diagonal, ones above.
HPReal divdiff_exp_opitz(std::span<const HPReal> nodes, const Rational& sigma = 1,
                         Precision prec = default_precision());

/// Hermite-Genocchi simplex integral of f^(n) by Gauss-Legendre quadrature.
HPReal divdiff_hermite_quadrature(const FunctionSpec& f, std::span<const HPReal> nodes, int quad_points,
                                  Precision prec = default_precision());

/// t^(p-1) [t x_1 .. t x_p]_f - [x_1 .. x_p]_{f_t}.
template <class Real>
Real scaling_identity_gap(const FunctionSpec& f, const Rational& t, std::span<const Real> nodes,
                          Precision prec = default_precision());

/// Quadrature of int_0^t e^(-mu s) [s l_1 .. s l_k]_exp s^(k-1) ds minus
/// t^k e^(-mu t) [t l_1 .. t l_k, t mu]_exp.
HPReal laplace_lemma_gap(std::span<const HPReal> lambdas, const HPReal& mu, const HPReal& t, int quad_points,
                         Precision prec = default_precision());

}  // namespace tracelap
