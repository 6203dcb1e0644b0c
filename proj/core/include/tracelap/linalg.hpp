#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "tracelap/errors.hpp"
#include "tracelap/exactnum.hpp"
#include "tracelap/function_spec.hpp"

namespace tracelap {

/// Dense row-major matrix.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, const T& fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix adjoint() const {
    Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = conj((*this)(i, j));
    return out;
  }

  T trace() const {
    T sum{};
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) sum += (*this)(i, i);
    return sum;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DomainError("matrix dimension mismatch in product");
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) {
    a.check_same(b);
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] += b.data_[k];
    return a;
  }
  friend Matrix operator-(Matrix a, const Matrix& b) {
    a.check_same(b);
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] -= b.data_[k];
    return a;
  }
  friend Matrix operator*(const T& s, Matrix a) {
    for (auto& x : a.data_) x = s * x;
    return a;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  void check_same(const Matrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) throw DomainError("matrix dimension mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Largest absolute entry.
HPReal max_abs(const Matrix<HPComplex>& m);
HPReal max_abs(const Matrix<HPReal>& m);

/// Square self-adjoint matrix with complex entries over `Real`.  Construction
/// validates the Hermitian property: exactly for rationals, to 2^(-prec/2)
/// relative tolerance for floats (which are then symmetrized).
template <class Real>
class Hermitian {
 public:
  using Entry = Complex<Real>;

  Hermitian() = default;
  explicit Hermitian(Matrix<Entry> m);

  static Hermitian zero(std::size_t n) { return Hermitian(Matrix<Entry>(n, n)); }
  static Hermitian diagonal(std::span<const Real> values) {
    Matrix<Entry> m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = Entry(values[i]);
    return Hermitian(std::move(m));
  }

  std::size_t dim() const { return m_.rows(); }
  const Matrix<Entry>& matrix() const { return m_; }
  const Entry& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  bool is_diagonal() const;
  bool is_zero() const;
  Real trace() const { return m_.trace().re; }

 private:
  Matrix<Entry> m_;
};

using ExactHermitian = Hermitian<Rational>;
using FloatHermitian = Hermitian<HPReal>;
using AnyHermitian = std::variant<ExactHermitian, FloatHermitian>;

FloatHermitian to_float(const ExactHermitian& m, Precision prec);
FloatHermitian to_float(const AnyHermitian& m, Precision prec);
FloatHermitian with_precision(const FloatHermitian& m, Precision prec);
Mode mode_of(const AnyHermitian& m);
std::size_t dim_of(const AnyHermitian& m);

/// M = U diag(eigenvalues) U*, eigenvalues ascending.
struct EigenDecomposition {
  std::vector<HPReal> eigenvalues;
  Matrix<HPComplex> vectors;
};

/// Cyclic complex Jacobi.  Throws NumericalError when the sweep cap is hit.
EigenDecomposition eigen_decompose(const FloatHermitian& m, Precision prec);
EigenDecomposition eigen_decompose(const ExactHermitian& m, Precision prec);

/// Eigenvalues of the unperturbed matrix x plus the perturbation h written in
/// x's eigenbasis.
template <class Real>
struct EigenFrame {
  std::vector<Real> eigenvalues;
  Hermitian<Real> h;

  std::size_t dim() const { return eigenvalues.size(); }
  static constexpr Mode mode() { return RealTraits<Real>::mode; }
};

using ExactFrame = EigenFrame<Rational>;
using FloatFrame = EigenFrame<HPReal>;
using AnyFrame = std::variant<ExactFrame, FloatFrame>;

FloatFrame to_float(const ExactFrame& frame, Precision prec);
FloatFrame to_float(const AnyFrame& frame, Precision prec);

/// Eigen-frame of (A, B) with A positive definite and B positive semi-definite.
/// Exact input with diagonal A stays exact; everything else is diagonalized in
/// float mode.  Throws DomainError naming the offending eigenvalue.
AnyFrame to_eigenframe(const AnyHermitian& a, const AnyHermitian& b, Precision prec);
FloatFrame to_eigenframe(const FloatHermitian& a, const FloatHermitian& b, Precision prec);

/// Tolerance below which a negative float eigenvalue or pivot still counts as psd.
HPReal psd_tolerance(Precision prec);

/// Rows a_i with (a_i | a_j) = sum_m weights_m a_im conj(a_jm) = h_ij.
/// Exact mode stores the LDL* pair (rows = L, weights = D); float mode stores
/// L sqrt(D) with unit weights.
template <class Real>
struct GramRows {
  Matrix<Complex<Real>> rows;
  std::vector<Real> weights;

  Complex<Real> inner(std::size_t i, std::size_t j) const;
  Matrix<Complex<Real>> gram() const;
};

/// Throws DomainError("not psd") on a negative pivot beyond tolerance.
template <class Real>
GramRows<Real> gram_rows(const Hermitian<Real>& h, Precision prec = default_precision());

/// Exact psd test by pivot signs (no square roots), or float test with tolerance.
template <class Real>
bool is_psd(const Hermitian<Real>& h, Precision prec = default_precision());

/// U f(diag lambda) U*.
FloatHermitian hermitian_function(const FloatHermitian& m, const FunctionSpec& f, Precision prec);

/// Scaling and squaring with a Taylor kernel.
template <class T>
Matrix<T> matrix_exp(const Matrix<T>& m, Precision prec);

inline Matrix<HPComplex> complex_matrix_exp(const Matrix<HPComplex>& m, Precision prec) { return matrix_exp(m, prec); }

}  // namespace tracelap
