#include "tracelap/formulations.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "tracelap/errors.hpp"
#include "tracelap/rng.hpp"

namespace tracelap {

namespace {

void check_pair(const ExactHermitian& a, const ExactHermitian& b, int p) {
  if (a.dim() != b.dim()) throw DomainError("A and B must have the same dimension");
  if (p < 1) throw DomainError("power p must be >= 1");
}

Rational real_trace(const Matrix<GaussianRational>& m) {
  const GaussianRational t = m.trace();
  if (t.im != 0) throw NumericalError("trace of a Hermitian word sum is not real");
  return t.re;
}

}  // namespace

bool PolyCoefficients::all_nonnegative() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const Rational& c) { return c >= 0; });
}

PolyCoefficients poly_coefficients(const ExactHermitian& a, const ExactHermitian& b, int p) {
  check_pair(a, b, p);
  using M = Matrix<GaussianRational>;
  const std::size_t n = a.dim();
  // power[k] is the t^k coefficient of (A + tB)^j.
  std::vector<M> power{M::identity(n)};
  for (int j = 1; j <= p; ++j) {
    std::vector<M> next(j + 1, M(n, n));
    for (int k = 0; k < j; ++k) {
      next[k] = next[k] + power[k] * a.matrix();
      next[k + 1] = next[k + 1] + power[k] * b.matrix();
    }
    power = std::move(next);
  }
  PolyCoefficients out;
  out.p = p;
  for (const auto& m : power) out.coeffs.push_back(real_trace(m));
  return out;
}

PolyCoefficients poly_coefficients_oracle(const ExactHermitian& a, const ExactHermitian& b, int p) {
  check_pair(a, b, p);
  if (p > 12) throw RangeError("word enumeration is capped at p = 12");
  using M = Matrix<GaussianRational>;
  const std::size_t n = a.dim();
  std::vector<Matrix<GaussianRational>> sums(p + 1, M(n, n));
  for (unsigned word = 0; word < (1U << p); ++word) {
    M product = M::identity(n);
    int b_count = 0;
    for (int letter = 0; letter < p; ++letter) {
      if ((word >> letter) & 1U) {
        product = product * b.matrix();
        ++b_count;
      } else {
        product = product * a.matrix();
      }
    }
    sums[b_count] = sums[b_count] + product;
  }
  PolyCoefficients out;
  out.p = p;
  for (const auto& m : sums) out.coeffs.push_back(real_trace(m));
  return out;
}

PositiveTypeReport positive_type_check(const FloatHermitian& a, const FloatHermitian& b,
                                       std::span<const HPReal> samples, Precision prec) {
  if (a.dim() != b.dim()) throw DomainError("A and B must have the same dimension");
  if (samples.empty()) throw DomainError("positive-type check needs at least one sample");
  const Precision work = prec + 32;
  const std::size_t n = a.dim();
  auto g = [&](const HPReal& t) {
    Matrix<HPComplex> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const HPComplex bij = at_precision(b(i, j), work);
        // A + i t B
        m(i, j) = at_precision(a(i, j), work) + HPComplex(HPReal(-(t * bij.im)), HPReal(t * bij.re));
      }
    return complex_matrix_exp(m, work).trace();
  };

  const std::size_t s = samples.size();
  PositiveTypeReport report;
  for (const auto& t : samples) report.samples.push_back(t.with_precision(work));
  report.g = Matrix<HPComplex>(s, s);
  for (std::size_t j = 0; j < s; ++j) {
    for (std::size_t k = 0; k < s; ++k) report.g(j, k) = g(report.samples[j] - report.samples[k]);
  }
  const FloatHermitian gram(report.g);
  const auto decomposition = eigen_decompose(gram, prec);
  report.min_eigenvalue = decomposition.eigenvalues.front();
  report.tolerance = psd_tolerance(prec) * max(HPReal(1), max_abs(report.g));
  report.pass = !(report.min_eigenvalue < -report.tolerance);
  for (auto& t : report.samples) t = t.with_precision(prec);
  for (std::size_t j = 0; j < s; ++j)
    for (std::size_t k = 0; k < s; ++k) report.g(j, k) = at_precision(report.g(j, k), prec);
  return report;
}

Matrix<HPReal> m_positive_probe_matrix(const MPositiveProbe& probe, const HPReal& alpha, int sample,
                                       Precision prec) {
  const auto k = static_cast<std::size_t>(probe.k);
  CounterRng rng(probe.seed, static_cast<std::uint64_t>(sample));
  Matrix<HPComplex> x(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      const HPReal value(rng.uniform(), prec);
      x(i, j) = HPComplex(value);
      x(j, i) = HPComplex(value);
    }
  // Nonnegative symmetric: the spectral radius is the largest eigenvalue.
  const auto decomposition = eigen_decompose(FloatHermitian(x), prec);
  HPReal radius(prec);
  for (const auto& mu : decomposition.eigenvalues) radius = max(radius, abs(mu));
  Matrix<HPReal> out(k, k, HPReal(prec));
  if (radius.is_zero()) return out;
  const HPReal scale = alpha * HPReal(0.99, prec) / radius;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) out(i, j) = x(i, j).re * scale;
  return out;
}

MPositiveReport m_positive_check(const FloatHermitian& a, const FloatHermitian& b, const MPositiveProbe& probe,
                                 Precision prec) {
  if (a.dim() != b.dim()) throw DomainError("A and B must have the same dimension");
  if (probe.k < 1) throw DomainError("probe dimension k must be >= 1");
  if (probe.count < 1) throw DomainError("sample count must be >= 1");
  const Precision work = prec + 32;
  const std::size_t n = a.dim();
  if (!is_psd(a, prec) || !is_psd(b, prec)) throw DomainError("A and B must be positive definite");

  MPositiveReport report;
  report.k = probe.k;
  report.count = probe.count;
  report.seed = probe.seed;
  if (probe.alpha) {
    if (*probe.alpha <= 0) throw DomainError("alpha must be > 0");
    report.alpha = HPReal(*probe.alpha, prec);
  } else {
    const HPReal norm = max_abs(b.matrix());
    if (norm.is_zero()) throw DomainError("default alpha needs B != 0; pass --alpha");
    report.alpha = HPReal(1L, prec) / (HPReal(2L * probe.k, prec) * norm);
  }

  auto phi = [&](const HPReal& t) {
    Matrix<HPComplex> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        m(i, j) = at_precision(a(i, j), work) + HPComplex(t) * at_precision(b(i, j), work);
    const auto decomposition = eigen_decompose(FloatHermitian(std::move(m)), work);
    HPReal sum(work);
    for (const auto& mu : decomposition.eigenvalues) sum += exp(mu);
    return sum;
  };

  auto sample_min = [&](int sample) {
    const Matrix<HPReal> x = m_positive_probe_matrix(probe, report.alpha, sample, work);
    const std::size_t k = x.rows();
    Matrix<HPComplex> xc(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) xc(i, j) = HPComplex(x(i, j));
    const auto decomposition = eigen_decompose(FloatHermitian(xc), work);
    const auto& v = decomposition.vectors;
    std::vector<HPReal> values;
    for (const auto& mu : decomposition.eigenvalues) values.push_back(phi(mu));
    HPReal best(work);
    bool first = true;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        HPComplex entry{HPReal(work)};
        for (std::size_t m = 0; m < k; ++m) entry += v(i, m) * HPComplex(values[m]) * conj(v(j, m));
        if (first || entry.re < best) best = entry.re;
        first = false;
      }
    return best;
  };

  std::vector<HPReal> minima(probe.count, HPReal(work));
  const int workers = std::max(1, std::min(probe.workers, probe.count));
  if (workers == 1) {
    for (int s = 0; s < probe.count; ++s) minima[s] = sample_min(s);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int s = w; s < probe.count; s += workers) minima[s] = sample_min(s);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& failure : failures)
      if (failure) std::rethrow_exception(failure);
  }
  report.argmin_sample = 0;
  for (int s = 1; s < probe.count; ++s)
    if (minima[s] < minima[report.argmin_sample]) report.argmin_sample = s;
  report.min_entry = minima[report.argmin_sample].with_precision(prec);
  report.tolerance = psd_tolerance(prec) * max(HPReal(1), phi(HPReal(work)));
  report.pass = !(report.min_entry < -report.tolerance);
  return report;
}

}  // namespace tracelap
