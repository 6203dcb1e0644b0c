#include "tracelap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace tracelap {

namespace {

std::mutex cache_mutex;

GaussLegendreRule compute_rule(int q, Precision prec) {
  const Precision work = prec + 32;
  GaussLegendreRule rule;
  const HPReal one(1L, work);
  for (int i = 0; i < q; ++i) {
    HPReal x(std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5)), work);
    HPReal derivative(work);
    for (int iter = 0; iter < 200; ++iter) {
      HPReal p0 = one;
      HPReal p1 = x;
      for (int k = 2; k <= q; ++k) {
        HPReal p2 = (HPReal(2L * k - 1, work) * x * p1 - HPReal(k - 1L, work) * p0) / HPReal(long(k), work);
        p0 = std::move(p1);
        p1 = std::move(p2);
      }
      if (q == 1) p0 = one;
      derivative = HPReal(long(q), work) * (x * p1 - p0) / (x * x - one);
      const HPReal step = p1 / derivative;
      x -= step;
      if (step.is_zero() || step.exponent() < -static_cast<long>(work) + 4) break;
    }
    HPReal p0 = one;
    HPReal p1 = x;
    for (int k = 2; k <= q; ++k) {
      HPReal p2 = (HPReal(2L * k - 1, work) * x * p1 - HPReal(k - 1L, work) * p0) / HPReal(long(k), work);
      p0 = std::move(p1);
      p1 = std::move(p2);
    }
    if (q == 1) p0 = one;
    derivative = HPReal(long(q), work) * (x * p1 - p0) / (x * x - one);
    const HPReal w = HPReal(2L, work) / ((one - x * x) * derivative * derivative);
    rule.nodes.push_back(ldexp(one + x, -1).with_precision(prec));
    rule.weights.push_back(ldexp(w, -1).with_precision(prec));
  }
  // Newton from cos guesses yields descending nodes; keep them ascending.
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  return rule;
}

Matrix<HPReal> compute_integration_matrix(int q, Precision prec) {
  const Precision work = prec + 32;
  const GaussLegendreRule& rule = gauss_legendre(q, work);
  const auto& s = rule.nodes;
  std::vector<HPReal> bary(q, HPReal(1L, work));
  for (int j = 0; j < q; ++j)
    for (int k = 0; k < q; ++k)
      if (k != j) bary[j] /= s[j] - s[k];

  Matrix<HPReal> out(q, q, HPReal(work));
  std::vector<HPReal> diff(q, HPReal(work));
  for (int i = 0; i < q; ++i) {
    for (int m = 0; m < q; ++m) {
      const HPReal x = s[i] * s[m];
      HPReal full(1L, work);
      int hit = -1;
      for (int k = 0; k < q; ++k) {
        diff[k] = x - s[k];
        if (diff[k].is_zero()) hit = k;
        full *= diff[k];
      }
      const HPReal scale = s[i] * rule.weights[m];
      for (int j = 0; j < q; ++j) {
        HPReal basis(work);
        if (hit >= 0) {
          basis = HPReal(hit == j ? 1L : 0L, work);
        } else {
          basis = full * bary[j] / diff[j];
        }
        out(i, j) += scale * basis;
      }
    }
  }
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) out(i, j) = out(i, j).with_precision(prec);
  return out;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int points, Precision prec) {
  if (points < 1) throw DomainError("quadrature needs at least one point");
  static std::map<std::pair<int, Precision>, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[{points, prec}];
  if (!slot) slot = std::make_unique<GaussLegendreRule>(compute_rule(points, prec));
  return *slot;
}

const Matrix<HPReal>& integration_matrix(int points, Precision prec) {
  if (points < 1) throw DomainError("quadrature needs at least one point");
  static std::map<std::pair<int, Precision>, std::unique_ptr<Matrix<HPReal>>> cache;
  {
    std::lock_guard lock(cache_mutex);
    auto it = cache.find({points, prec});
    if (it != cache.end()) return *it->second;
  }
  auto computed = std::make_unique<Matrix<HPReal>>(compute_integration_matrix(points, prec));
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[{points, prec}];
  if (!slot) slot = std::move(computed);
  return *slot;
}

HPReal integrate(const std::function<HPReal(const HPReal&)>& g, const HPReal& a, const HPReal& b, int points,
                 Precision prec) {
  const GaussLegendreRule& rule = gauss_legendre(points, prec);
  const HPReal width = b.with_precision(prec) - a.with_precision(prec);
  HPReal sum(prec);
  for (int i = 0; i < points; ++i) sum += rule.weights[i] * g(a + width * rule.nodes[i]);
  return sum * width;
}

HPReal separable_simplex_integral(std::span<const std::function<HPReal(const HPReal&)>> factors, int points,
                                  Precision prec) {
  const std::size_t n = factors.size();
  if (n == 0) return HPReal(1L, prec);
  const GaussLegendreRule& rule = gauss_legendre(points, prec);
  const Matrix<HPReal>& s = integration_matrix(points, prec);
  // inner[i] holds the integral of the innermost factors up to t = s_i.
  std::vector<HPReal> inner(points, HPReal(1L, prec));
  for (std::size_t level = n; level-- > 1;) {
    std::vector<HPReal> values(points, HPReal(prec));
    for (int j = 0; j < points; ++j) values[j] = factors[level](rule.nodes[j]) * inner[j];
    for (int i = 0; i < points; ++i) {
      HPReal sum(prec);
      for (int j = 0; j < points; ++j) sum += s(i, j) * values[j];
      inner[i] = sum;
    }
  }
  HPReal total(prec);
  for (int i = 0; i < points; ++i) total += rule.weights[i] * factors[0](rule.nodes[i]) * inner[i];
  return total;
}

namespace {

HPReal nested(int level, int n, std::vector<HPReal>& t, const HPReal& upper,
              const std::function<HPReal(std::span<const HPReal>)>& integrand, const GaussLegendreRule& rule,
              Precision prec) {
  if (level == n) return integrand(t);
  HPReal sum(prec);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    t[level] = upper * rule.nodes[i];
    sum += rule.weights[i] * nested(level + 1, n, t, t[level], integrand, rule, prec);
  }
  return sum * upper;
}

}  // namespace

HPReal nested_simplex_integral(int n, const std::function<HPReal(std::span<const HPReal>)>& integrand, int points,
                               Precision prec, double max_evaluations) {
  if (n < 0) throw DomainError("negative simplex dimension");
  if (std::pow(double(points), n) > max_evaluations) {
    throw RangeError("nested quadrature would need " + std::to_string(points) + "^" + std::to_string(n) +
                     " evaluations");
  }
  const GaussLegendreRule& rule = gauss_legendre(points, prec);
  std::vector<HPReal> t(n, HPReal(prec));
  return nested(0, n, t, HPReal(1L, prec), integrand, rule, prec);
}

}  // namespace tracelap
