#include "tracelap/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace tracelap {

namespace {

constexpr int kMaxJacobiSweeps = 100;

HPReal hp_zero(Precision prec) { return HPReal(prec); }

}  // namespace

HPReal max_abs(const Matrix<HPComplex>& m) {
  HPReal best(kMinPrecision);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) best = max(best, abs(m(i, j)));
  return best;
}

HPReal max_abs(const Matrix<HPReal>& m) {
  HPReal best(kMinPrecision);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) best = max(best, abs(m(i, j)));
  return best;
}

template <>
Hermitian<Rational>::Hermitian(Matrix<Entry> m) : m_(std::move(m)) {
  if (!m_.square()) throw DomainError("Hermitian matrix must be square");
  for (std::size_t i = 0; i < dim(); ++i) {
    if (m_(i, i).im != 0) throw DomainError("Hermitian matrix has a non-real diagonal entry");
    for (std::size_t j = i + 1; j < dim(); ++j) {
      if (!(m_(i, j) == conj(m_(j, i)))) {
        throw DomainError("matrix is not Hermitian at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
}

template <>
Hermitian<HPReal>::Hermitian(Matrix<Entry> m) : m_(std::move(m)) {
  if (!m_.square()) throw DomainError("Hermitian matrix must be square");
  if (dim() == 0) return;
  Precision prec = kMinPrecision;
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j) prec = std::max({prec, m_(i, j).re.precision(), m_(i, j).im.precision()});
  const HPReal scale = max(HPReal(1), max_abs(m_));
  const HPReal tolerance = ldexp(scale, -static_cast<long>(prec / 2));
  for (std::size_t i = 0; i < dim(); ++i) {
    for (std::size_t j = i; j < dim(); ++j) {
      const HPComplex diff = m_(i, j) - conj(m_(j, i));
      if (abs(diff) > tolerance) {
        throw DomainError("matrix is not Hermitian at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      const HPComplex mean{ldexp(m_(i, j).re + m_(j, i).re, -1), ldexp(m_(i, j).im - m_(j, i).im, -1)};
      m_(i, j) = mean;
      m_(j, i) = conj(mean);
    }
    m_(i, i).im = hp_zero(m_(i, i).re.precision());
  }
}

template <class Real>
bool Hermitian<Real>::is_diagonal() const {
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j)
      if (i != j && !m_(i, j).is_zero()) return false;
  return true;
}

template <class Real>
bool Hermitian<Real>::is_zero() const {
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j)
      if (!m_(i, j).is_zero()) return false;
  return true;
}

template class Hermitian<Rational>;
template class Hermitian<HPReal>;

FloatHermitian to_float(const ExactHermitian& m, Precision prec) {
  Matrix<HPComplex> out(m.dim(), m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out(i, j) = to_hp(m(i, j), prec);
  return FloatHermitian(std::move(out));
}

FloatHermitian with_precision(const FloatHermitian& m, Precision prec) {
  Matrix<HPComplex> out(m.dim(), m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out(i, j) = at_precision(m(i, j), prec);
  return FloatHermitian(std::move(out));
}

FloatHermitian to_float(const AnyHermitian& m, Precision prec) {
  if (const auto* exact = std::get_if<ExactHermitian>(&m)) return to_float(*exact, prec);
  return with_precision(std::get<FloatHermitian>(m), prec);
}

Mode mode_of(const AnyHermitian& m) { return std::holds_alternative<ExactHermitian>(m) ? Mode::Exact : Mode::Float; }

std::size_t dim_of(const AnyHermitian& m) {
  return std::visit([](const auto& x) { return x.dim(); }, m);
}

EigenDecomposition eigen_decompose(const FloatHermitian& input, Precision prec) {
  const std::size_t n = input.dim();
  const Precision work = prec + 32;
  Matrix<HPComplex> a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = at_precision(input(i, j), work);
  Matrix<HPComplex> v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = HPComplex(HPReal(1L, work));

  HPReal total(work);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) total += a(i, j).norm();
  const HPReal threshold = ldexp(total, -2 * static_cast<long>(prec + 16));

  auto off_diagonal = [&] {
    HPReal off(work);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) off += a(i, j).norm();
    return off;
  };

  int sweep = 0;
  while (!(off_diagonal() <= threshold)) {
    if (++sweep > kMaxJacobiSweeps) throw NumericalError("Jacobi eigen-decomposition did not converge");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const HPReal g = abs(a(p, q));
        if (g.is_zero()) continue;
        const HPComplex phase = a(p, q) / HPComplex(g);
        const HPReal tau = (a(q, q).re - a(p, p).re) / ldexp(g, 1);
        HPReal t = tau.is_zero() ? HPReal(1L, work) : HPReal(1L, work) / (abs(tau) + sqrt(HPReal(1L, work) + tau * tau));
        if (tau.sign() < 0) t = -t;
        const HPReal c = HPReal(1L, work) / sqrt(HPReal(1L, work) + t * t);
        const HPReal s = t * c;
        // U = diag(1, conj(phase)) * [[c, s], [-s, c]] on rows/cols (p, q).
        const HPComplex u_pp(c);
        const HPComplex u_pq(s);
        const HPComplex u_qp = HPComplex(-s) * conj(phase);
        const HPComplex u_qq = HPComplex(c) * conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          const HPComplex akp = a(k, p);
          const HPComplex akq = a(k, q);
          a(k, p) = akp * u_pp + akq * u_qp;
          a(k, q) = akp * u_pq + akq * u_qq;
          const HPComplex vkp = v(k, p);
          const HPComplex vkq = v(k, q);
          v(k, p) = vkp * u_pp + vkq * u_qp;
          v(k, q) = vkp * u_pq + vkq * u_qq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const HPComplex apk = a(p, k);
          const HPComplex aqk = a(q, k);
          a(p, k) = conj(u_pp) * apk + conj(u_qp) * aqk;
          a(q, k) = conj(u_pq) * apk + conj(u_qq) * aqk;
        }
        a(p, q) = HPComplex(hp_zero(work));
        a(q, p) = HPComplex(hp_zero(work));
        a(p, p).im = hp_zero(work);
        a(q, q).im = hp_zero(work);
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i).re < a(j, j).re; });

  EigenDecomposition out;
  out.vectors = Matrix<HPComplex>(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues.push_back(a(order[k], order[k]).re.with_precision(prec));
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = at_precision(v(i, order[k]), prec);
  }
  return out;
}

EigenDecomposition eigen_decompose(const ExactHermitian& m, Precision prec) {
  return eigen_decompose(to_float(m, prec + 32), prec);
}

FloatFrame to_float(const ExactFrame& frame, Precision prec) {
  FloatFrame out;
  for (const auto& lambda : frame.eigenvalues) out.eigenvalues.emplace_back(lambda, prec);
  out.h = to_float(frame.h, prec);
  return out;
}

FloatFrame to_float(const AnyFrame& frame, Precision prec) {
  if (const auto* exact = std::get_if<ExactFrame>(&frame)) return to_float(*exact, prec);
  return std::get<FloatFrame>(frame);
}

HPReal psd_tolerance(Precision prec) { return pow2(-static_cast<long>(prec / 4), prec); }

namespace {

void require_positive_definite(std::span<const HPReal> eigenvalues) {
  for (const auto& lambda : eigenvalues) {
    if (lambda.sign() <= 0) {
      throw DomainError("A is not positive definite: eigenvalue " + lambda.to_string(20));
    }
  }
}

void require_psd(const FloatHermitian& b, Precision prec) {
  if (b.dim() == 0) return;
  const auto decomposition = eigen_decompose(b, prec);
  const HPReal scale = max(HPReal(1), max_abs(b.matrix()));
  const HPReal floor = -(psd_tolerance(prec) * scale);
  for (const auto& mu : decomposition.eigenvalues) {
    if (mu < floor) throw DomainError("B is not positive semi-definite: eigenvalue " + mu.to_string(20));
  }
}

}  // namespace

FloatFrame to_eigenframe(const FloatHermitian& a, const FloatHermitian& b, Precision prec) {
  if (a.dim() != b.dim()) throw DomainError("A and B must have the same dimension");
  require_psd(b, prec);
  const auto decomposition = eigen_decompose(a, prec);
  require_positive_definite(decomposition.eigenvalues);
  const Matrix<HPComplex>& u = decomposition.vectors;
  FloatFrame frame;
  frame.eigenvalues = decomposition.eigenvalues;
  frame.h = FloatHermitian(u.adjoint() * with_precision(b, prec + 32).matrix() * u);
  frame.h = with_precision(frame.h, prec);
  return frame;
}

AnyFrame to_eigenframe(const AnyHermitian& a, const AnyHermitian& b, Precision prec) {
  const auto* exact_a = std::get_if<ExactHermitian>(&a);
  const auto* exact_b = std::get_if<ExactHermitian>(&b);
  if (exact_a != nullptr && exact_b != nullptr && exact_a->is_diagonal()) {
    const std::size_t n = exact_a->dim();
    if (exact_b->dim() != n) throw DomainError("A and B must have the same dimension");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return (*exact_a)(i, i).re < (*exact_a)(j, j).re; });
    ExactFrame frame;
    for (std::size_t k = 0; k < n; ++k) {
      const Rational& lambda = (*exact_a)(order[k], order[k]).re;
      if (lambda <= 0) throw DomainError("A is not positive definite: eigenvalue " + to_string(lambda));
      frame.eigenvalues.push_back(lambda);
    }
    if (!is_psd(*exact_b)) throw DomainError("B is not positive semi-definite (negative LDL* pivot)");
    Matrix<GaussianRational> h(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) h(i, j) = (*exact_b)(order[i], order[j]);
    frame.h = ExactHermitian(std::move(h));
    return frame;
  }
  return to_eigenframe(to_float(a, prec), to_float(b, prec), prec);
}

template <class Real>
Complex<Real> GramRows<Real>::inner(std::size_t i, std::size_t j) const {
  Complex<Real> sum{};
  for (std::size_t m = 0; m < weights.size(); ++m) {
    if (weights[m] == 0) continue;
    sum += Complex<Real>(weights[m]) * rows(i, m) * conj(rows(j, m));
  }
  return sum;
}

template <class Real>
Matrix<Complex<Real>> GramRows<Real>::gram() const {
  Matrix<Complex<Real>> out(rows.rows(), rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i)
    for (std::size_t j = 0; j < rows.rows(); ++j) out(i, j) = inner(i, j);
  return out;
}

namespace {

/// LDL* without pivoting.  A psd matrix with a zero pivot has a zero row in
/// the Schur complement, which is checked instead of pivoting.
template <class Real>
bool ldl(const Hermitian<Real>& h, Precision prec, Matrix<Complex<Real>>& l, std::vector<Real>& d) {
  using C = Complex<Real>;
  const std::size_t n = h.dim();
  l = Matrix<C>(n, n);
  d.assign(n, Real(0));
  Real tolerance(0);
  if constexpr (!RealTraits<Real>::exact) {
    HPReal scale(1);
    for (std::size_t i = 0; i < n; ++i) scale = max(scale, abs(h(i, i).re));
    tolerance = psd_tolerance(prec) * scale;
  }
  for (std::size_t k = 0; k < n; ++k) {
    Real pivot = h(k, k).re;
    for (std::size_t m = 0; m < k; ++m) pivot -= d[m] * l(k, m).norm();
    l(k, k) = C(1);
    bool zero_pivot;
    if constexpr (RealTraits<Real>::exact) {
      if (pivot < 0) return false;
      zero_pivot = pivot == 0;
    } else {
      if (pivot < -tolerance) return false;
      zero_pivot = pivot <= tolerance;
      if (zero_pivot) pivot = HPReal(pivot.precision());
    }
    d[k] = pivot;
    for (std::size_t i = k + 1; i < n; ++i) {
      C residual = h(i, k);
      for (std::size_t m = 0; m < k; ++m) residual -= C(d[m]) * l(i, m) * conj(l(k, m));
      if (zero_pivot) {
        if constexpr (RealTraits<Real>::exact) {
          if (!residual.is_zero()) return false;
        } else {
          if (abs(residual) > sqrt(tolerance) * max(HPReal(1), sqrt(abs(h(i, i).re)))) return false;
        }
        l(i, k) = C(0);
      } else {
        l(i, k) = residual / C(pivot);
      }
    }
  }
  return true;
}

}  // namespace

template <class Real>
GramRows<Real> gram_rows(const Hermitian<Real>& h, Precision prec) {
  GramRows<Real> out;
  if (!ldl(h, prec, out.rows, out.weights)) throw DomainError("not psd: negative pivot in LDL* factorization");
  if constexpr (!RealTraits<Real>::exact) {
    for (std::size_t m = 0; m < out.weights.size(); ++m) {
      const HPReal root = sqrt(out.weights[m]);
      for (std::size_t i = 0; i < out.rows.rows(); ++i) out.rows(i, m) = out.rows(i, m) * HPComplex(root);
      out.weights[m] = HPReal(1L, root.precision());
    }
  }
  return out;
}

template <class Real>
bool is_psd(const Hermitian<Real>& h, Precision prec) {
  Matrix<Complex<Real>> l;
  std::vector<Real> d;
  return ldl(h, prec, l, d);
}

template struct GramRows<Rational>;
template struct GramRows<HPReal>;
template GramRows<Rational> gram_rows(const Hermitian<Rational>&, Precision);
template GramRows<HPReal> gram_rows(const Hermitian<HPReal>&, Precision);
template bool is_psd(const Hermitian<Rational>&, Precision);
template bool is_psd(const Hermitian<HPReal>&, Precision);

FloatHermitian hermitian_function(const FloatHermitian& m, const FunctionSpec& f, Precision prec) {
  const auto decomposition = eigen_decompose(m, prec + 32);
  const std::size_t n = m.dim();
  Matrix<HPComplex> scaled = decomposition.vectors;
  for (std::size_t k = 0; k < n; ++k) {
    const HPReal& lambda = decomposition.eigenvalues[k];
    if (!f.in_domain(lambda)) {
      throw DomainError("eigenvalue " + lambda.to_string(20) + " outside the domain of " + f.describe());
    }
    const HPComplex value(f.taylor_coefficient(lambda, 0, prec + 32));
    for (std::size_t i = 0; i < n; ++i) scaled(i, k) = scaled(i, k) * value;
  }
  return with_precision(FloatHermitian(scaled * decomposition.vectors.adjoint()), prec);
}

namespace {

template <class T>
T identity_entry(Precision prec) {
  return T(HPReal(1L, prec));
}

template <class T>
HPReal one_norm(const Matrix<T>& m) {
  HPReal best(kMinPrecision);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    HPReal column(kMinPrecision);
    for (std::size_t i = 0; i < m.rows(); ++i) column += magnitude(m(i, j));
    best = max(best, column);
  }
  return best;
}

}  // namespace

template <class T>
Matrix<T> matrix_exp(const Matrix<T>& m, Precision prec) {
  if (!m.square()) throw DomainError("matrix exponential needs a square matrix");
  const std::size_t n = m.rows();
  const HPReal norm = one_norm(m);
  if (!norm.is_finite()) throw RangeError("matrix exponential of a non-finite matrix");
  long squarings = 0;
  if (!norm.is_zero()) squarings = std::max(0L, norm.exponent() + 1);
  const Precision work = prec + 32 + 2 * static_cast<Precision>(squarings);

  Matrix<T> x(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) x(i, j) = at_precision(m(i, j), work);
  const T shrink = T(pow2(-squarings, work));
  x = shrink * x;

  Matrix<T> result(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) result(i, j) = T(HPReal(work));
    result(i, i) = identity_entry<T>(work);
  }
  Matrix<T> term = result;
  const HPReal cutoff = pow2(-static_cast<long>(work), work);
  for (long k = 1; k < 100000; ++k) {
    term = term * x;
    const T inv_k = T(HPReal(1L, work) / HPReal(k, work));
    term = inv_k * term;
    result = result + term;
    if (one_norm(term) <= cutoff * max(HPReal(1L, work), one_norm(result))) break;
  }
  for (long s = 0; s < squarings; ++s) result = result * result;

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) result(i, j) = at_precision(result(i, j), prec);
  return result;
}

template Matrix<HPReal> matrix_exp(const Matrix<HPReal>&, Precision);
template Matrix<HPComplex> matrix_exp(const Matrix<HPComplex>&, Precision);

}  // namespace tracelap
