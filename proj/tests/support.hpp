#pragma once

// Seeded generators shared by the unit tests and the acceptance runner.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "tracelap/function_spec.hpp"
#include "tracelap/linalg.hpp"
#include "tracelap/rng.hpp"

namespace tracelap::testing {

inline Rational small_rational(CounterRng& rng, long num_range = 9, long den_max = 6) {
  Rational q(Int(rng.integer(-num_range, num_range)), Int(rng.integer(1, den_max)));
  q.canonicalize();
  return q;
}

inline Rational positive_rational(CounterRng& rng, long num_max = 12, long den_max = 6) {
  Rational q(Int(rng.integer(1, num_max)), Int(rng.integer(1, den_max)));
  q.canonicalize();
  return q;
}

/// L D L* with unit lower-triangular Gaussian-rational L and D >= 0, so the
/// result is psd by construction.  Up to `zero_pivots` pivots are zeroed.
inline ExactHermitian random_psd(CounterRng& rng, std::size_t n, bool complex_entries = true, int zero_pivots = 0) {
  Matrix<GaussianRational> l(n, n);
  std::vector<Rational> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    l(i, i) = GaussianRational(1);
    for (std::size_t j = 0; j < i; ++j) {
      l(i, j) = GaussianRational(small_rational(rng, 4, 3), complex_entries ? small_rational(rng, 3, 2) : Rational(0));
    }
    d[i] = positive_rational(rng, 6, 4);
  }
  for (int z = 0; z < zero_pivots && n > 0; ++z) d[static_cast<std::size_t>(rng.integer(0, n - 1))] = 0;
  Matrix<GaussianRational> dm(n, n);
  for (std::size_t i = 0; i < n; ++i) dm(i, i) = GaussianRational(d[i]);
  return ExactHermitian(l * dm * l.adjoint());
}

/// Random exact Hermitian matrix with small entries.
inline ExactHermitian random_hermitian(CounterRng& rng, std::size_t n) {
  Matrix<GaussianRational> m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = GaussianRational(small_rational(rng));
    for (std::size_t j = 0; j < i; ++j) {
      GaussianRational z(small_rational(rng), small_rational(rng));
      m(i, j) = z;
      m(j, i) = conj(z);
    }
  }
  return ExactHermitian(m);
}

/// Positive definite: psd plus a positive multiple of the identity.
inline ExactHermitian random_positive_definite(CounterRng& rng, std::size_t n) {
  Matrix<GaussianRational> m = random_psd(rng, n).matrix();
  for (std::size_t i = 0; i < n; ++i) m(i, i) += GaussianRational(positive_rational(rng, 4, 2));
  return ExactHermitian(m);
}

inline std::vector<Rational> distinct_positive(CounterRng& rng, std::size_t n) {
  std::vector<Rational> out;
  while (out.size() < n) {
    Rational q = positive_rational(rng, 20, 4);
    bool fresh = true;
    for (const auto& x : out) fresh = fresh && x != q;
    if (fresh) out.push_back(q);
  }
  return out;
}

/// beta + sum_k w_k / (c_k + t) with 1 to 3 atoms.
inline FunctionSpec random_monotone(CounterRng& rng) {
  std::vector<ResolventAtom> atoms;
  const auto count = rng.integer(1, 3);
  for (std::int64_t k = 0; k < count; ++k) {
    Rational shift(Int(rng.integer(0, 4)), Int(rng.integer(1, 3)));
    shift.canonicalize();
    atoms.push_back({shift, positive_rational(rng, 5, 3)});
  }
  return FunctionSpec::monotone(Rational(rng.integer(0, 2)), std::move(atoms));
}

inline ExactHermitian exact_diagonal(const std::vector<Rational>& values) { return ExactHermitian::diagonal(values); }

/// Frame with eigenvalues lambda and perturbation h.
inline ExactFrame exact_frame(std::vector<Rational> lambda, ExactHermitian h) { return {std::move(lambda), std::move(h)}; }

/// Fresh scratch directory under TRACELAP_TEST_TMP (or the system temp dir).
inline std::filesystem::path scratch_dir(const std::string& name) {
  const char* root = std::getenv("TRACELAP_TEST_TMP");
  const std::filesystem::path dir =
      (root != nullptr ? std::filesystem::path(root) : std::filesystem::temp_directory_path() / "tracelap-tests") / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Relative difference |a - b| / max(1, |a|, |b|).
inline HPReal relative_gap(const HPReal& a, const HPReal& b) {
  return abs(a - b) / max(HPReal(1), max(abs(a), abs(b)));
}

}  // namespace tracelap::testing
