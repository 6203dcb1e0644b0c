#include "tracelap/loops.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tracelap/errors.hpp"
#include "tracelap/quadrature.hpp"
#include "tracelap/rng.hpp"
#include "tracelap/traceder.hpp"

namespace tracelap {

template <class Real>
void VectorFamily<Real>::validate() const {
  if (vectors.empty()) throw DomainError("vector family is empty");
  for (const auto& v : vectors) {
    if (v.size() != dim()) throw DomainError("vector family has inconsistent dimensions");
  }
  if (!weights.empty() && weights.size() != dim()) throw DomainError("weight count differs from vector dimension");
}

template <class Real>
Complex<Real> VectorFamily<Real>::inner(std::size_t i, std::size_t j) const {
  Complex<Real> sum{};
  const auto& u = vectors.at(i);
  const auto& v = vectors.at(j);
  for (std::size_t m = 0; m < u.size(); ++m) {
    Complex<Real> term = u[m] * conj(v[m]);
    if (!weights.empty()) term = Complex<Real>(weights[m]) * term;
    sum += term;
  }
  return sum;
}

template <class Real>
Matrix<Complex<Real>> VectorFamily<Real>::gram() const {
  Matrix<Complex<Real>> g(size(), size());
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j) g(i, j) = inner(i, j);
  return g;
}

template <class Real>
VectorFamily<Real> VectorFamily<Real>::from_gram(const GramRows<Real>& rows) {
  VectorFamily out;
  for (std::size_t i = 0; i < rows.rows.rows(); ++i) {
    std::vector<Complex<Real>> v;
    for (std::size_t m = 0; m < rows.rows.cols(); ++m) v.push_back(rows.rows(i, m));
    out.vectors.push_back(std::move(v));
  }
  out.weights = rows.weights;
  return out;
}

template struct VectorFamily<Rational>;
template struct VectorFamily<HPReal>;

FloatFamily to_float(const ExactFamily& family, Precision prec) {
  FloatFamily out;
  for (const auto& v : family.vectors) {
    std::vector<HPComplex> w;
    for (const auto& z : v) w.push_back(to_hp(z, prec));
    out.vectors.push_back(std::move(w));
  }
  for (const auto& q : family.weights) out.weights.emplace_back(q, prec);
  return out;
}

template <class Real>
Complex<Real> loop_value(const VectorFamily<Real>& family, std::span<const std::size_t> indices) {
  if (indices.empty()) throw DomainError("loop needs at least one index");
  for (std::size_t i : indices) {
    if (i >= family.size()) throw DomainError("loop index " + std::to_string(i) + " out of range");
  }
  Complex<Real> product = family.inner(indices[0], indices[indices.size() > 1 ? 1 : 0]);
  for (std::size_t k = 1; k < indices.size(); ++k) {
    product = product * family.inner(indices[k], indices[(k + 1) % indices.size()]);
  }
  return product;
}

template <class Real>
Complex<Real> canonical_loop(const VectorFamily<Real>& family) {
  std::vector<std::size_t> indices(family.size());
  for (std::size_t k = 0; k < indices.size(); ++k) indices[k] = k;
  return loop_value(family, indices);
}

template Complex<Rational> loop_value(const ExactFamily&, std::span<const std::size_t>);
template Complex<HPReal> loop_value(const FloatFamily&, std::span<const std::size_t>);
template Complex<Rational> canonical_loop(const ExactFamily&);
template Complex<HPReal> canonical_loop(const FloatFamily&);

HPReal loop_bound(int p, Precision prec) {
  if (p < 2) throw DomainError("loop bound needs p >= 2");
  const Precision work = prec + 32;
  const HPReal c = cos(const_pi(work) / HPReal(long(p), work));
  return (-pow(c, p)).with_precision(prec);
}

FloatFamily fan_family(int p, Precision prec) {
  if (p < 2) throw DomainError("fan needs p >= 2");
  const Precision work = prec + 32;
  FloatFamily out;
  for (int k = 0; k < p; ++k) {
    const HPReal angle = const_pi(work) * HPReal(long(k), work) / HPReal(long(p), work);
    out.vectors.push_back({HPComplex(cos(angle).with_precision(prec)), HPComplex(sin(angle).with_precision(prec))});
  }
  return out;
}

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t m = 0; m < a.size(); ++m) s += a[m] * b[m];
  return s;
}

void normalize(Vec& a) {
  const double n = std::sqrt(dot(a, a));
  for (auto& x : a) x /= n;
}

double loop_double(const std::vector<Vec>& a) {
  double product = 1;
  for (std::size_t k = 0; k < a.size(); ++k) product *= dot(a[k], a[(k + 1) % a.size()]);
  return product;
}

std::vector<Vec> loop_gradient(const std::vector<Vec>& a) {
  const std::size_t p = a.size();
  std::vector<double> c(p);
  for (std::size_t k = 0; k < p; ++k) c[k] = dot(a[k], a[(k + 1) % p]);
  // excl[k] = product of all c except c[k]
  std::vector<double> prefix(p + 1, 1.0);
  std::vector<double> suffix(p + 1, 1.0);
  for (std::size_t k = 0; k < p; ++k) prefix[k + 1] = prefix[k] * c[k];
  for (std::size_t k = p; k-- > 0;) suffix[k] = suffix[k + 1] * c[k];
  std::vector<double> excl(p);
  for (std::size_t k = 0; k < p; ++k) excl[k] = prefix[k] * suffix[k + 1];

  std::vector<Vec> g(p, Vec(a[0].size(), 0.0));
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t prev = (k + p - 1) % p;
    const std::size_t next = (k + 1) % p;
    for (std::size_t m = 0; m < a[k].size(); ++m) g[k][m] = excl[prev] * a[prev][m] + excl[k] * a[next][m];
    const double radial = dot(g[k], a[k]);
    for (std::size_t m = 0; m < a[k].size(); ++m) g[k][m] -= radial * a[k][m];
  }
  return g;
}

std::vector<Vec> descend(std::vector<Vec> a) {
  double value = loop_double(a);
  double step = 0.1;
  for (int iter = 0; iter < 20000; ++iter) {
    const auto g = loop_gradient(a);
    double gnorm = 0;
    for (const auto& v : g) gnorm += dot(v, v);
    if (gnorm < 1e-30) break;
    bool improved = false;
    while (step > 1e-16) {
      std::vector<Vec> trial = a;
      for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t m = 0; m < a[k].size(); ++m) trial[k][m] -= step * g[k][m];
        normalize(trial[k]);
      }
      const double trial_value = loop_double(trial);
      if (trial_value < value) {
        a = std::move(trial);
        improved = value - trial_value > 0;
        value = trial_value;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return a;
}

}  // namespace

LoopSearchResult loop_min_search(int p, int d, int restarts, std::uint64_t seed, Precision prec) {
  if (p < 2) throw DomainError("loop search needs p >= 2");
  if (d < 2) throw DomainError("loop search needs dimension d >= 2");
  if (restarts < 1) throw DomainError("loop search needs at least one restart");
  std::vector<Vec> best;
  double best_value = 0;
  int best_restart = -1;
  for (int r = 0; r < restarts; ++r) {
    CounterRng rng(seed, static_cast<std::uint64_t>(r));
    std::vector<Vec> a(p, Vec(d));
    for (auto& v : a) {
      for (auto& x : v) {
        // Box-Muller keeps the start uniform on the sphere.
        const double u1 = 1.0 - rng.uniform();
        const double u2 = rng.uniform();
        x = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
      }
      normalize(v);
    }
    a = descend(std::move(a));
    const double value = loop_double(a);
    if (best_restart < 0 || value < best_value) {
      best = a;
      best_value = value;
      best_restart = r;
    }
  }

  LoopSearchResult result;
  result.best_restart = best_restart;
  result.restarts = restarts;
  for (const auto& v : best) {
    std::vector<HPReal> coords;
    HPReal norm2(prec + 32);
    for (double x : v) {
      coords.emplace_back(x, prec + 32);
      norm2 += coords.back() * coords.back();
    }
    const HPReal norm = sqrt(norm2);
    std::vector<HPComplex> unit;
    for (auto& x : coords) unit.emplace_back((x / norm).with_precision(prec));
    result.family.vectors.push_back(std::move(unit));
  }
  result.value = canonical_loop(result.family).re.with_precision(prec);
  return result;
}

void IntegrandPoint::validate() const {
  if (!(0 <= t3 && t3 <= t2 && t2 <= t1 && t1 <= 1)) {
    throw DomainError("integrand point must satisfy 0 <= t3 <= t2 <= t1 <= 1");
  }
}

IntegrandValue triple_integrand(const ExactFamily& family, std::span<const Log2Multiple> lambda,
                                const IntegrandPoint& point, Precision prec) {
  family.validate();
  point.validate();
  const std::size_t n = family.size();
  if (lambda.size() != n) throw DomainError("need one lambda per vector");
  const Matrix<GaussianRational> g = family.gram();
  const Rational wp = 1 - (point.t1 - point.t3);
  const Rational wi = point.t1 - point.t2;
  const Rational wj = point.t2 - point.t3;

  bool exact = true;
  for (std::size_t p = 0; p < n && exact; ++p)
    for (std::size_t i = 0; i < n && exact; ++i)
      for (std::size_t j = 0; j < n && exact; ++j) {
        const Rational e = wp * lambda[p].coefficient + wi * lambda[i].coefficient + wj * lambda[j].coefficient;
        exact = e.get_den() == 1;
      }

  if (exact) {
    Rational sum = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const GaussianRational loop = g(p, i) * g(i, j) * g(j, p);
          if (loop.re == 0) continue;
          const Rational e = wp * lambda[p].coefficient + wi * lambda[i].coefficient + wj * lambda[j].coefficient;
          sum += loop.re * exp_pow2(e).exact();
        }
    return {Number(sum), Mode::Exact};
  }

  const Precision work = prec + 32;
  HPReal sum(work);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const GaussianRational loop = g(p, i) * g(i, j) * g(j, p);
        if (loop.re == 0) continue;
        const Rational e = wp * lambda[p].coefficient + wi * lambda[i].coefficient + wj * lambda[j].coefficient;
        sum += HPReal(loop.re, work) * exp_pow2(e, work).to_hp(work);
      }
  return {Number(sum.with_precision(prec)), Mode::Float};
}

HPReal triple_integrand(const FloatFamily& family, std::span<const HPReal> lambda, const HPReal& t1, const HPReal& t2,
                        const HPReal& t3, Precision prec) {
  family.validate();
  const std::size_t n = family.size();
  if (lambda.size() != n) throw DomainError("need one lambda per vector");
  const Precision work = prec + 32;
  const Matrix<HPComplex> g = family.gram();
  const HPReal wp = HPReal(1L, work) - (t1 - t3);
  const HPReal wi = t1 - t2;
  const HPReal wj = t2 - t3;
  HPReal sum(work);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const HPComplex loop = g(p, i) * g(i, j) * g(j, p);
        if (loop.re.is_zero()) continue;
        sum += loop.re * exp(wp * lambda[p] + wi * lambda[i] + wj * lambda[j]);
      }
  return sum.with_precision(prec);
}

ThirdDerivativeValue third_derivative_value(const ExactFamily& family, std::span<const Log2Multiple> lambda,
                                            Precision prec, int quad_points) {
  family.validate();
  const std::size_t n = family.size();
  if (lambda.size() != n) throw DomainError("need one lambda per vector");
  const Precision work = prec + 32;
  std::vector<HPReal> l;
  for (const auto& m : lambda) l.push_back(m.value(work));
  const Matrix<GaussianRational> g = family.gram();

  // d^3/dt^3 tr exp(x - th) = -d^3/ds^3 tr exp(x + sh), so the closed form is
  // (1/3!) times the loop sum for exp(+t).
  FloatFrame frame;
  frame.eigenvalues = l;
  Matrix<HPComplex> h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = to_hp(g(i, j), work);
  frame.h = FloatHermitian(std::move(h));
  ThirdDerivativeValue out;
  out.closed_form = (trace_derivative_exp(frame, 1, 3, work, TraceLimits{3, std::max<std::size_t>(n, 8)}) /
                     HPReal(6L, work));

  // Each term factors as e^{l_p} e^{t1 (l_i - l_p)} e^{t2 (l_j - l_i)} e^{t3 (l_p - l_j)}.
  HPReal total(work);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const GaussianRational loop = g(p, i) * g(i, j) * g(j, p);
        if (loop.re == 0) continue;
        const HPReal r1 = l[i] - l[p];
        const HPReal r2 = l[j] - l[i];
        const HPReal r3 = l[p] - l[j];
        std::vector<std::function<HPReal(const HPReal&)>> factors{
            [&](const HPReal& t) { return exp(r1 * t); },
            [&](const HPReal& t) { return exp(r2 * t); },
            [&](const HPReal& t) { return exp(r3 * t); },
        };
        total += HPReal(loop.re, work) * exp(l[p]) * separable_simplex_integral(factors, quad_points, work);
      }
  out.quadrature = total;
  out.gap = (out.closed_form - out.quadrature).with_precision(prec);
  out.closed_form = out.closed_form.with_precision(prec);
  out.quadrature = out.quadrature.with_precision(prec);
  return out;
}

ExactFamily bmv_example_family(ExampleVariant variant) {
  auto row = [](long x, long y, long z) {
    return std::vector<GaussianRational>{GaussianRational(Rational(x)), GaussianRational(Rational(y)),
                                         GaussianRational(Rational(z))};
  };
  ExactFamily family;
  family.vectors.push_back(row(1000, -10, 1));
  family.vectors.push_back(row(-10, 10000, 1000));
  family.vectors.push_back(row(1, 1000, variant == ExampleVariant::Original ? 202139 : 202138));
  return family;
}

std::vector<Log2Multiple> bmv_example_lambda() { return {{Rational(69)}, {Rational(33)}, {Rational(0)}}; }

IntegrandPoint bmv_example_point() { return {Rational(1), Rational(1), Rational(1, 3)}; }

IntegrandValue bmv_example(ExampleVariant variant, Precision prec) {
  const auto lambda = bmv_example_lambda();
  return triple_integrand(bmv_example_family(variant), lambda, bmv_example_point(), prec);
}

}  // namespace tracelap
