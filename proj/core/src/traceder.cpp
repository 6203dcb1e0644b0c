#include "tracelap/traceder.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <functional>
#include <unordered_map>

#include "tracelap/errors.hpp"

namespace tracelap {

namespace {

void check_limits(std::size_t n, int p, const TraceLimits& limits) {
  if (p < 1) throw DomainError("derivative order must be >= 1");
  if (p > limits.max_order) {
    throw RangeError("order " + std::to_string(p) + " exceeds the cap " + std::to_string(limits.max_order));
  }
  if (n > limits.max_dim) {
    throw RangeError("dimension " + std::to_string(n) + " exceeds the cap " + std::to_string(limits.max_dim));
  }
  if (n > 16) throw RangeError("dimension above 16 is not supported by the multiset encoding");
}

/// Index multiset packed into 4-bit counters.
using MultisetKey = std::uint64_t;

MultisetKey add_index(MultisetKey key, int i) { return key + (MultisetKey{1} << (4 * i)); }

std::vector<int> unpack(MultisetKey key, std::size_t n) {
  std::vector<int> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto count = static_cast<int>((key >> (4 * i)) & 0xF);
    for (int c = 0; c < count; ++c) out.push_back(static_cast<int>(i));
  }
  return out;
}

template <class Real>
Real factorial_of(int p, Precision prec) {
  Real out = from_rational<Real>(1, prec);
  for (int k = 2; k <= p; ++k) out = Real(out * from_rational<Real>(k, prec));
  return out;
}

/// Sums loop products per multiset, then weights each multiset by its divided difference.
template <class Real>
Real loop_sum(const EigenFrame<Real>& frame, int p, bool theorem_order,
              const std::function<Real(const std::vector<Real>&)>& kernel, Precision prec) {
  using C = Complex<Real>;
  const std::size_t n = frame.dim();
  const auto& h = frame.h;
  std::unordered_map<MultisetKey, C> sums;
  std::vector<int> tuple(p);

  std::function<void(int, MultisetKey, const C&)> visit = [&](int depth, MultisetKey key, const C& prefix) {
    if (depth == p) {
      C product = prefix;
      MultisetKey full;
      if (theorem_order) {
        product = product * h(tuple[0], tuple[p - 1]);
        full = add_index(key, tuple[p - 1]);
      } else {
        product = product * h(tuple[p - 1], tuple[0]);
        full = add_index(key, tuple[0]);
      }
      if (product.is_zero()) return;
      auto [it, inserted] = sums.try_emplace(full, product);
      if (!inserted) it->second += product;
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      tuple[depth] = static_cast<int>(i);
      C next = prefix;
      if (depth > 0) {
        const C& entry = theorem_order ? h(i, tuple[depth - 1]) : h(tuple[depth - 1], i);
        if (entry.is_zero()) continue;
        next = prefix * entry;
      }
      visit(depth + 1, add_index(key, static_cast<int>(i)), next);
    }
  };
  C one(from_rational<Real>(1, prec));
  visit(0, 0, one);

  // Deterministic order for the final accumulation.
  std::vector<MultisetKey> keys;
  keys.reserve(sums.size());
  for (const auto& entry : sums) keys.push_back(entry.first);
  std::sort(keys.begin(), keys.end());

  Real total = from_rational<Real>(0, prec);
  for (MultisetKey key : keys) {
    std::vector<Real> nodes;
    for (int i : unpack(key, n)) nodes.push_back(frame.eigenvalues[i]);
    total = Real(total + sums[key].re * kernel(nodes));
  }
  total = Real(total * factorial_of<Real>(p, prec));
  if constexpr (!RealTraits<Real>::exact) total = total.with_precision(prec);
  return total;
}

template <class Real>
Real widen(const Real& x, Precision prec) {
  if constexpr (RealTraits<Real>::exact) {
    (void)prec;
    return x;
  } else {
    return x.with_precision(std::max(prec, x.precision()));
  }
}

template <class Real>
EigenFrame<Real> widened_frame(const EigenFrame<Real>& frame, Precision prec) {
  if constexpr (RealTraits<Real>::exact) {
    (void)prec;
    return frame;
  } else {
    FloatFrame out;
    for (const auto& l : frame.eigenvalues) out.eigenvalues.push_back(widen(l, prec));
    out.h = with_precision(frame.h, prec);
    return out;
  }
}

}  // namespace

template <class Real>
Real trace_derivative(const EigenFrame<Real>& frame, const FunctionSpec& f, int p, Precision prec,
                      const TraceLimits& limits) {
  check_limits(frame.dim(), p, limits);
  if constexpr (RealTraits<Real>::exact) {
    if (!f.exact_capable()) throw DomainError("exponential trace derivatives need float mode");
  }
  const Precision work = prec + 32;
  const EigenFrame<Real> wide = widened_frame(frame, work);
  const auto kernel = [&](const std::vector<Real>& nodes) { return divided_difference<Real>(f, nodes, work); };
  Real value = loop_sum<Real>(wide, p, false, kernel, work);
  if constexpr (!RealTraits<Real>::exact) value = value.with_precision(prec);
  return value;
}

template <class Real>
Real trace_derivative_theorem_order(const EigenFrame<Real>& frame, const FunctionSpec& f, int p, Precision prec,
                                    const TraceLimits& limits) {
  check_limits(frame.dim(), p, limits);
  if constexpr (RealTraits<Real>::exact) {
    if (!f.exact_capable()) throw DomainError("exponential trace derivatives need float mode");
  }
  const Precision work = prec + 32;
  const EigenFrame<Real> wide = widened_frame(frame, work);
  const auto kernel = [&](const std::vector<Real>& nodes) { return divided_difference<Real>(f, nodes, work); };
  Real value = loop_sum<Real>(wide, p, true, kernel, work);
  if constexpr (!RealTraits<Real>::exact) value = value.with_precision(prec);
  return value;
}

Number trace_derivative(const AnyFrame& frame, const FunctionSpec& f, int p, Precision prec,
                        const TraceLimits& limits) {
  if (const auto* exact = std::get_if<ExactFrame>(&frame); exact != nullptr && f.exact_capable()) {
    return trace_derivative<Rational>(*exact, f, p, prec, limits);
  }
  const FloatFrame approx = to_float(frame, prec + 32);
  if (auto sigma = f.exp_scale()) return trace_derivative_exp(approx, *sigma, p, prec, limits);
  return trace_derivative<HPReal>(approx, f, p, prec, limits);
}

HPReal trace_derivative_exp(const FloatFrame& frame, const Rational& sigma, int p, Precision prec,
                            const TraceLimits& limits) {
  check_limits(frame.dim(), p, limits);
  const Precision work = prec + 32;
  const FloatFrame wide = widened_frame(frame, work);
  const auto kernel = [&](const std::vector<HPReal>& nodes) { return divdiff_exp_opitz(nodes, sigma, work); };
  return loop_sum<HPReal>(wide, p, false, kernel, work).with_precision(prec);
}

HPReal trace_derivative_fd(const FloatHermitian& a, const FloatHermitian& b, const FunctionSpec& f, int p,
                           const HPReal& t0, Precision prec) {
  if (p < 0) throw DomainError("derivative order must be >= 0");
  if (a.dim() != b.dim()) throw DomainError("A and B must have the same dimension");
  const Precision work = prec + 32;
  const long step_exponent = -static_cast<long>(prec / static_cast<Precision>(p + 2));
  const HPReal step = pow2(step_exponent, work);
  const std::size_t n = a.dim();

  auto phi = [&](const HPReal& t) {
    Matrix<HPComplex> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        m(i, j) = at_precision(a(i, j), work) + HPComplex(t) * at_precision(b(i, j), work);
    const auto decomposition = eigen_decompose(FloatHermitian(std::move(m)), work);
    HPReal sum(work);
    for (const auto& mu : decomposition.eigenvalues) sum += f.taylor_coefficient(mu, 0, work);
    return sum;
  };

  HPReal total(work);
  Int binomial(1);
  for (int k = 0; k <= p; ++k) {
    // offset (k - p/2) * step
    const HPReal offset = ldexp(HPReal(2L * k - p, work) * step, -1);
    HPReal term = HPReal(binomial, work) * phi(t0.with_precision(work) + offset);
    if ((p - k) % 2 != 0) term = -term;
    total += term;
    binomial = binomial * (p - k) / (k + 1);
  }
  return ldexp(total, -step_exponent * p).with_precision(prec);
}

FloatFrame shift_frame(const AnyFrame& frame, const Rational& t0, Precision prec) {
  if (t0 < 0) throw DomainError("shift t0 must be >= 0");
  const Precision work = prec + 32;
  FloatFrame base = to_float(frame, work);
  if (t0 == 0 || base.h.is_zero()) return to_float(frame, prec);
  const std::size_t n = base.dim();
  Matrix<HPComplex> m(n, n);
  const HPComplex t(HPReal(t0, work));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = t * base.h(i, j);
  for (std::size_t i = 0; i < n; ++i) m(i, i) += HPComplex(base.eigenvalues[i]);
  const auto decomposition = eigen_decompose(FloatHermitian(std::move(m)), work);
  const Matrix<HPComplex>& u = decomposition.vectors;
  FloatFrame out;
  for (const auto& mu : decomposition.eigenvalues) out.eigenvalues.push_back(mu.with_precision(prec));
  out.h = with_precision(FloatHermitian(u.adjoint() * base.h.matrix() * u), prec);
  return out;
}

HPReal sign_tolerance(Precision prec) { return pow2(-static_cast<long>(prec / 3), prec); }

int classify_sign(const Number& value, Precision prec) {
  if (value.is_exact()) return value.sign();
  if (abs(value.approx()) <= sign_tolerance(prec)) return 0;
  return value.approx().sign();
}

bool DerivativeReport::alternates() const {
  return std::all_of(entries.begin(), entries.end(), [](const DerivativeEntry& e) { return e.sign >= 0; });
}

DerivativeReport complete_monotonicity_report(const AnyHermitian& a, const AnyHermitian& b, const FunctionSpec& f,
                                              int max_order, std::span<const Rational> t_grid, Precision prec,
                                              const TraceLimits& limits) {
  if (max_order < 1) throw DomainError("max order must be >= 1");
  const AnyFrame frame = to_eigenframe(a, b, prec + 32);
  DerivativeReport report;
  report.function = f.describe();
  report.tolerance = sign_tolerance(prec);
  const bool exact_frame = std::holds_alternative<ExactFrame>(frame);
  for (const Rational& t0 : t_grid) {
    if (t0 < 0) throw DomainError("grid points must be >= 0");
    const bool certify = t0 == 0 && exact_frame && f.exact_capable();
    std::optional<FloatFrame> shifted;
    if (!certify) shifted = shift_frame(frame, t0, prec + 32);
    for (int p = 1; p <= max_order; ++p) {
      DerivativeEntry entry;
      entry.t0 = t0;
      entry.p = p;
      entry.certified = certify;
      Number derivative;
      if (certify) {
        derivative = trace_derivative<Rational>(std::get<ExactFrame>(frame), f, p, prec, limits);
        entry.method = "loop-sum/exact";
        const Rational& v = derivative.exact();
        entry.value = (p % 2 == 0) ? v : Rational(-v);
      } else {
        HPReal v = [&] {
          if (auto sigma = f.exp_scale()) {
            entry.method = "loop-sum/opitz";
            return trace_derivative_exp(*shifted, *sigma, p, prec, limits);
          }
          entry.method = "loop-sum/newton";
          return trace_derivative<HPReal>(*shifted, f, p, prec, limits);
        }();
        entry.value = (p % 2 == 0) ? v : HPReal(-v);
      }
      entry.sign = classify_sign(entry.value, prec);
      report.entries.push_back(std::move(entry));
    }
  }
  return report;
}

template Rational trace_derivative(const ExactFrame&, const FunctionSpec&, int, Precision, const TraceLimits&);
template HPReal trace_derivative(const FloatFrame&, const FunctionSpec&, int, Precision, const TraceLimits&);
template Rational trace_derivative_theorem_order(const ExactFrame&, const FunctionSpec&, int, Precision,
                                                 const TraceLimits&);
template HPReal trace_derivative_theorem_order(const FloatFrame&, const FunctionSpec&, int, Precision,
                                               const TraceLimits&);

}  // namespace tracelap
