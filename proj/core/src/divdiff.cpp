#include "tracelap/divdiff.hpp"

#include <algorithm>
#include <cmath>

#include "tracelap/errors.hpp"
#include "tracelap/linalg.hpp"
#include "tracelap/quadrature.hpp"

namespace tracelap {

namespace {

template <class Real>
void check_nonempty(std::span<const Real> nodes) {
  if (nodes.empty()) throw DomainError("divided difference needs at least one node");
}

template <class Real>
std::string node_text(const Real& x) {
  if constexpr (RealTraits<Real>::exact) {
    return to_string(x);
  } else {
    return x.to_string(20);
  }
}

template <class Real>
void check_domain(const FunctionSpec& f, std::span<const Real> nodes) {
  for (const auto& x : nodes) {
    if (!f.in_domain(x)) throw DomainError("node " + node_text(x) + " outside the domain of " + f.describe());
  }
}

template <class Real>
std::vector<Real> sorted_copy(std::span<const Real> nodes, Precision prec) {
  std::vector<Real> out;
  out.reserve(nodes.size());
  for (const auto& x : nodes) {
    if constexpr (RealTraits<Real>::exact) {
      (void)prec;
      out.push_back(x);
    } else {
      out.push_back(x.with_precision(std::max(prec, x.precision())));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Real& a, const Real& b) { return a < b; });
  return out;
}

/// Smallest gap between distinct neighbouring nodes; zero when all nodes coincide.
HPReal min_separation(const std::vector<HPReal>& sorted) {
  HPReal best(kMinPrecision);
  bool found = false;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i] == sorted[i + 1]) continue;
    const HPReal gap = sorted[i + 1] - sorted[i];
    if (!found || gap < best) best = gap;
    found = true;
  }
  return best;
}

HPReal product_formula_sum(const MonotoneRepresentation& rep, std::span<const HPReal> nodes, Precision prec) {
  HPReal sum(prec);
  if (nodes.size() == 1) sum = HPReal(rep.constant, prec);
  for (const auto& atom : rep.atoms) {
    sum += HPReal(atom.weight, prec) * divdiff_resolvent_product<HPReal>(atom.shift, nodes, prec);
  }
  return sum;
}

}  // namespace

template <class Real>
DivDiffTable<Real> divdiff_table(const FunctionSpec& f, std::span<const Real> nodes, Precision prec) {
  check_nonempty(nodes);
  check_domain(f, nodes);
  DivDiffTable<Real> table;
  table.nodes = sorted_copy(nodes, prec);
  const auto& x = table.nodes;
  const std::size_t n = x.size();

  // Start index of the run of equal nodes containing i.
  std::vector<std::size_t> run_start(n, 0);
  for (std::size_t i = 1; i < n; ++i) run_start[i] = (x[i] == x[i - 1]) ? run_start[i - 1] : i;

  table.columns.resize(n);
  for (std::size_t i = 0; i < n; ++i) table.columns[0].push_back(f.taylor(x[i], 0, prec));
  for (std::size_t k = 1; k < n; ++k) {
    auto& column = table.columns[k];
    column.reserve(n - k);
    for (std::size_t i = 0; i + k < n; ++i) {
      const std::size_t j = i + k;
      if (run_start[j] <= i) {
        column.push_back(f.taylor(x[i], static_cast<int>(k), prec));
      } else {
        column.push_back(Real((table.columns[k - 1][i + 1] - table.columns[k - 1][i]) / (x[j] - x[i])));
      }
    }
  }
  return table;
}

template <>
Rational divided_difference<Rational>(const FunctionSpec& f, std::span<const Rational> nodes, Precision prec) {
  if (!f.exact_capable()) throw DomainError("exponential divided differences need float mode");
  return divdiff_table(f, nodes, prec).top();
}

template <>
HPReal divided_difference<HPReal>(const FunctionSpec& f, std::span<const HPReal> nodes, Precision prec) {
  check_nonempty(nodes);
  check_domain(f, nodes);
  if (nodes.size() == 1) return f.taylor_coefficient(nodes[0], 0, prec).with_precision(prec);
  const std::vector<HPReal> sorted = sorted_copy(nodes, prec);
  const HPReal delta = min_separation(sorted);
  const std::size_t order = nodes.size() - 1;
  if (!delta.is_zero() && delta.exponent() < -static_cast<long>(prec / 2)) {
    if (auto sigma = f.exp_scale()) return divdiff_exp_opitz(nodes, *sigma, prec);
    if (auto rep = f.as_monotone()) return product_formula_sum(*rep, nodes, prec).with_precision(prec);
  }
  long lost = 0;
  if (!delta.is_zero()) lost = std::max(0L, -delta.exponent() + 1);
  const Precision work = prec + static_cast<Precision>(order * lost) + 32;
  std::vector<HPReal> widened;
  widened.reserve(sorted.size());
  for (const auto& x : sorted) widened.push_back(x.with_precision(std::max(work, x.precision())));
  return divdiff_table<HPReal>(f, widened, work).top().with_precision(prec);
}

Number divided_difference(const FunctionSpec& f, std::span<const Rational> nodes, Mode preferred, Precision prec) {
  if (preferred == Mode::Exact && f.exact_capable()) return divided_difference<Rational>(f, nodes, prec);
  std::vector<HPReal> approx;
  approx.reserve(nodes.size());
  for (const auto& q : nodes) approx.emplace_back(q, prec + 64);
  return divided_difference<HPReal>(f, approx, prec);
}

template <class Real>
Real divdiff_resolvent_product(const Rational& c, std::span<const Real> nodes, Precision prec) {
  check_nonempty(nodes);
  Real product = from_rational<Real>(1, prec);
  for (const auto& x : nodes) {
    const Real shifted = Real(from_rational<Real>(c, prec) + x);
    if (shifted == 0) throw DomainError("pole of 1/(c+t) at node " + node_text(x));
    if (shifted < 0) throw DomainError("node " + node_text(x) + " below -c");
    product = Real(product / shifted);
  }
  if (nodes.size() % 2 == 0) product = Real(-product);
  if constexpr (!RealTraits<Real>::exact) product = product.with_precision(prec);
  return product;
}

HPReal divdiff_exp_opitz(std::span<const HPReal> nodes, const Rational& sigma, Precision prec) {
  check_nonempty(nodes);
  const std::size_t n = nodes.size();
  const Precision work = prec + 32;
  if (sigma == 0) return HPReal(n == 1 ? 1L : 0L, prec);
  const HPReal s(sigma, work);
  Matrix<HPReal> j(n, n, HPReal(work));
  for (std::size_t i = 0; i < n; ++i) {
    j(i, i) = s * nodes[i].with_precision(std::max(work, nodes[i].precision()));
    if (i + 1 < n) j(i, i + 1) = s;
  }
  const Matrix<HPReal> e = matrix_exp(j, work);
  return e(0, n - 1).with_precision(prec);
}

HPReal divdiff_hermite_quadrature(const FunctionSpec& f, std::span<const HPReal> nodes, int quad_points,
                                  Precision prec) {
  check_nonempty(nodes);
  check_domain(f, nodes);
  const int order = static_cast<int>(nodes.size()) - 1;
  const Precision work = prec + 32;
  std::vector<HPReal> x;
  for (const auto& v : nodes) x.push_back(v.with_precision(std::max(work, v.precision())));
  if (order == 0) return f.taylor_coefficient(x[0], 0, work).with_precision(prec);

  // [x_0..x_n]_f = simplex integral of f^(n)(x_0 + sum_k t_k (x_k - x_{k-1})).
  HPReal n_factorial(1L, work);
  for (int k = 2; k <= order; ++k) n_factorial *= HPReal(long(k), work);

  if (auto sigma = f.exp_scale()) {
    const HPReal s(*sigma, work);
    std::vector<std::function<HPReal(const HPReal&)>> factors;
    for (int k = 1; k <= order; ++k) {
      const HPReal rate = s * (x[k] - x[k - 1]);
      factors.emplace_back([rate](const HPReal& t) { return exp(rate * t); });
    }
    const HPReal integral = separable_simplex_integral(factors, quad_points, work);
    return (pow(s, order) * exp(s * x[0]) * integral).with_precision(prec);
  }

  auto integrand = [&](std::span<const HPReal> t) {
    HPReal y = x[0];
    for (int k = 1; k <= order; ++k) y += t[k - 1] * (x[k] - x[k - 1]);
    return f.taylor_coefficient(y, order, work) * n_factorial;
  };
  return nested_simplex_integral(order, integrand, quad_points, work).with_precision(prec);
}

template <class Real>
Real scaling_identity_gap(const FunctionSpec& f, const Rational& t, std::span<const Real> nodes, Precision prec) {
  check_nonempty(nodes);
  const Real scale = from_rational<Real>(t, prec + 64);
  std::vector<Real> scaled;
  for (const auto& x : nodes) scaled.push_back(Real(scale * x));
  Real left = divided_difference<Real>(f, scaled, prec);
  for (std::size_t k = 1; k < nodes.size(); ++k) left = Real(left * scale);
  const Real right = divided_difference<Real>(FunctionSpec::scaled(f, t), nodes, prec);
  Real gap = Real(left - right);
  if constexpr (!RealTraits<Real>::exact) gap = gap.with_precision(prec);
  return gap;
}

HPReal laplace_lemma_gap(std::span<const HPReal> lambdas, const HPReal& mu, const HPReal& t, int quad_points,
                         Precision prec) {
  if (lambdas.empty()) throw DomainError("Laplace identity needs k >= 1");
  if (t.sign() < 0) throw DomainError("Laplace identity needs t >= 0");
  const Precision work = prec + 32;
  const long k = static_cast<long>(lambdas.size());
  const FunctionSpec exp_f = FunctionSpec::exp();
  auto integrand = [&](const HPReal& s) {
    std::vector<HPReal> nodes;
    for (const auto& l : lambdas) nodes.push_back(s * l.with_precision(work));
    return exp(-(mu.with_precision(work) * s)) * divided_difference<HPReal>(exp_f, nodes, work) * pow(s, k - 1);
  };
  const HPReal left = integrate(integrand, HPReal(work), t.with_precision(work), quad_points, work);

  std::vector<HPReal> nodes;
  for (const auto& l : lambdas) nodes.push_back(t.with_precision(work) * l.with_precision(work));
  nodes.push_back(t.with_precision(work) * mu.with_precision(work));
  const HPReal right =
      pow(t.with_precision(work), k) * exp(-(mu.with_precision(work) * t)) * divided_difference<HPReal>(exp_f, nodes, work);
  return (left - right).with_precision(prec);
}

template DivDiffTable<Rational> divdiff_table(const FunctionSpec&, std::span<const Rational>, Precision);
template DivDiffTable<HPReal> divdiff_table(const FunctionSpec&, std::span<const HPReal>, Precision);
template Rational divdiff_resolvent_product(const Rational&, std::span<const Rational>, Precision);
template HPReal divdiff_resolvent_product(const Rational&, std::span<const HPReal>, Precision);
template Rational scaling_identity_gap(const FunctionSpec&, const Rational&, std::span<const Rational>, Precision);
template HPReal scaling_identity_gap(const FunctionSpec&, const Rational&, std::span<const HPReal>, Precision);

}  // namespace tracelap
