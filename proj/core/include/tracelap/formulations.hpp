#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tracelap/linalg.hpp"

namespace tracelap {

/// coeffs[k] = sum of tr(word) over words of length p with k factors B,
/// i.e. the coefficients of t -> tr (A + tB)^p.
struct PolyCoefficients {
  int p = 0;
  std::vector<Rational> coeffs;

  bool all_nonnegative() const;
  friend bool operator==(const PolyCoefficients&, const PolyCoefficients&) = default;
};

/// Truncated polynomial-matrix powers, O(p^2 n^3).
PolyCoefficients poly_coefficients(const ExactHermitian& a, const ExactHermitian& b, int p);

/// Enumerates all 2^p words; p <= 12.
PolyCoefficients poly_coefficients_oracle(const ExactHermitian& a, const ExactHermitian& b, int p);

struct PositiveTypeReport {
  std::vector<HPReal> samples;
  Matrix<HPComplex> g;  ///< g(t_j - t_k) with g(t) = tr exp(A + itB)
  HPReal min_eigenvalue;
  HPReal tolerance;
  bool pass = false;
};

PositiveTypeReport positive_type_check(const FloatHermitian& a, const FloatHermitian& b,
                                       std::span<const HPReal> samples, Precision prec = default_precision());

struct MPositiveProbe {
  std::optional<Rational> alpha;  ///< default 1 / (2 max|B_ij| k)
  int k = 3;
  int count = 100;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct MPositiveReport {
  HPReal alpha;
  int k = 0;
  int count = 0;
  std::uint64_t seed = 0;
  HPReal min_entry;
  int argmin_sample = -1;
  HPReal tolerance;
  bool pass = false;
};

/// phi(t) = tr exp(A + tB) applied spectrally to seeded probes X that are
/// symmetric, entrywise nonnegative and rescaled to spectral radius < alpha.
MPositiveReport m_positive_check(const FloatHermitian& a, const FloatHermitian& b, const MPositiveProbe& probe,
                                 Precision prec = default_precision());

/// The probe matrix for one sample index (exposed for reproduction).
Matrix<HPReal> m_positive_probe_matrix(const MPositiveProbe& probe, const HPReal& alpha, int sample, Precision prec);

}  // namespace tracelap
