#include <doctest.h>

#include "support.hpp"
#include "tracelap/errors.hpp"
#include "tracelap/loops.hpp"
#include "tracelap/traceder.hpp"

using namespace tracelap;

namespace {

constexpr Precision kPrec = 256;

HPReal tol(const char* text) { return HPReal(std::string_view(text), kPrec); }

ExactHermitian identity(std::size_t n) {
  std::vector<Rational> ones(n, Rational(1));
  return ExactHermitian::diagonal(ones);
}

FloatHermitian diag_float(const std::vector<HPReal>& values) { return FloatHermitian::diagonal(values); }

/// Unitary from the eigenvectors of a random Hermitian matrix.
Matrix<HPComplex> random_unitary(CounterRng& rng, std::size_t n) {
  return eigen_decompose(to_float(testing::random_hermitian(rng, n), kPrec + 32), kPrec + 32).vectors;
}

}  // namespace

TEST_CASE("first derivative of the resolvent trace") {
  const ExactFrame frame = testing::exact_frame({1, 2}, identity(2));
  CHECK(trace_derivative<Rational>(frame, FunctionSpec::resolvent(0), 1) == Rational(-5, 4));
  const Number any = trace_derivative(AnyFrame(frame), FunctionSpec::resolvent(0), 1);
  REQUIRE(any.is_exact());
  CHECK(any.exact() == Rational(-5, 4));
  const ExactFrame zero = testing::exact_frame({1, 3, 4}, ExactHermitian::zero(3));
  for (int p = 1; p <= 6; ++p) CHECK(trace_derivative<Rational>(zero, FunctionSpec::resolvent(2), p) == 0);
}

TEST_CASE("resolvent derivatives alternate exactly") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    CounterRng rng(seed, 1);
    const auto n = static_cast<std::size_t>(rng.integer(2, 3));
    const ExactFrame frame = testing::exact_frame(testing::distinct_positive(rng, n), testing::random_psd(rng, n));
    const Rational c(rng.integer(0, 2));
    for (int p = 1; p <= 5; ++p) {
      const Rational d = trace_derivative<Rational>(frame, FunctionSpec::resolvent(c), p);
      CHECK((p % 2 == 0 ? d >= 0 : d <= 0));
    }
  }
}

TEST_CASE("monotone derivatives alternate exactly") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng rng(seed, 2);
    const auto n = static_cast<std::size_t>(rng.integer(2, 4));
    std::vector<Rational> lambda;
    for (std::size_t i = 0; i < n; ++i) lambda.push_back(testing::positive_rational(rng, 6, 3));
    const ExactFrame frame = testing::exact_frame(lambda, testing::random_psd(rng, n, true, seed % 3 == 0 ? 1 : 0));
    const FunctionSpec f = testing::random_monotone(rng);
    for (int p = 1; p <= 4; ++p) {
      const Rational d = trace_derivative<Rational>(frame, f, p);
      CHECK((p % 2 == 0 ? d : Rational(-d)) >= 0);
    }
  }
}

TEST_CASE("linearity in the representing measure") {
  CounterRng rng(8, 8);
  const ExactFrame frame = testing::exact_frame(testing::distinct_positive(rng, 3), testing::random_psd(rng, 3));
  const std::vector<ResolventAtom> atoms{{Rational(0), Rational(2)}, {Rational(1, 2), Rational(3, 5)}, {Rational(4), 1}};
  const FunctionSpec f = FunctionSpec::monotone(Rational(7), atoms);
  for (int p = 1; p <= 4; ++p) {
    Rational combined = 0;
    for (const auto& atom : atoms) {
      combined += atom.weight * trace_derivative<Rational>(frame, FunctionSpec::resolvent(atom.shift), p);
    }
    CHECK(trace_derivative<Rational>(frame, f, p) == combined);
  }
}

TEST_CASE("both index orderings give the same sum") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    CounterRng rng(seed, 3);
    const ExactFrame frame = testing::exact_frame(testing::distinct_positive(rng, 3), testing::random_hermitian(rng, 3));
    const FunctionSpec f = testing::random_monotone(rng);
    for (int p = 1; p <= 5; ++p) {
      CHECK(trace_derivative<Rational>(frame, f, p) == trace_derivative_theorem_order<Rational>(frame, f, p));
    }
    const FloatFrame approx = to_float(frame, kPrec);
    const HPReal a = trace_derivative<HPReal>(approx, FunctionSpec::exp(-1), 4);
    const HPReal b = trace_derivative_theorem_order<HPReal>(approx, FunctionSpec::exp(-1), 4);
    CHECK(testing::relative_gap(a, b) < tol("1e-60"));
  }
}

TEST_CASE("exponential loop sum special cases") {
  FloatFrame scalar;
  scalar.eigenvalues = {HPReal("0.7", kPrec)};
  Matrix<HPComplex> h1(1, 1);
  h1(0, 0) = HPComplex(HPReal("1.5", kPrec));
  scalar.h = FloatHermitian(h1);
  for (int p = 1; p <= 5; ++p) {
    const HPReal expected = pow(HPReal("1.5", kPrec), p) * exp(scalar.eigenvalues[0]);
    CHECK(testing::relative_gap(trace_derivative_exp(scalar, 1, p), expected) < tol("1e-70"));
  }

  FloatFrame diagonal;
  diagonal.eigenvalues = {HPReal(1L, kPrec), HPReal(2L, kPrec), HPReal("0.25", kPrec)};
  diagonal.h = diag_float({HPReal(3L, kPrec), HPReal("0.5", kPrec), HPReal(0L, kPrec)});
  const Rational sigma(-3, 2);
  const HPReal s(sigma, kPrec);
  for (int p = 1; p <= 5; ++p) {
    HPReal expected(kPrec);
    for (std::size_t i = 0; i < 3; ++i) {
      expected += pow(diagonal.h(i, i).re * s, p) * exp(s * diagonal.eigenvalues[i]);
    }
    CHECK(testing::relative_gap(trace_derivative_exp(diagonal, sigma, p), expected) < tol("1e-70"));
    CHECK(testing::relative_gap(trace_derivative<HPReal>(diagonal, FunctionSpec::exp(sigma), p), expected) <
          tol("1e-60"));
  }
}

TEST_CASE("finite differences reference values") {
  const FloatHermitian a = to_float(testing::exact_diagonal({1, 2}), kPrec);
  const FloatHermitian b = to_float(identity(2), kPrec);
  const HPReal fd = trace_derivative_fd(a, b, FunctionSpec::resolvent(0), 1, HPReal(kPrec));
  CHECK(abs(fd - HPReal(Rational(-5, 4), kPrec)) < tol("1e-30"));
  const FloatHermitian zero = to_float(ExactHermitian::zero(2), kPrec);
  for (int p = 1; p <= 3; ++p) CHECK(abs(trace_derivative_fd(a, zero, FunctionSpec::exp(), p, HPReal(kPrec))) < tol("1e-30"));
}

TEST_CASE("closed form agrees with finite differences") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    CounterRng rng(seed, 4);
    const auto n = static_cast<std::size_t>(rng.integer(2, 3));
    const FloatHermitian a = to_float(testing::random_positive_definite(rng, n), kPrec);
    const FloatHermitian b = to_float(testing::random_psd(rng, n), kPrec);
    const FloatFrame frame = to_eigenframe(a, b, kPrec);
    const FunctionSpec f = seed % 2 == 0 ? FunctionSpec::exp(-1) : testing::random_monotone(rng);
    const int p = 1 + static_cast<int>(seed % 3);
    const HPReal closed = trace_derivative(AnyFrame(frame), f, p).to_hp(kPrec);
    const HPReal fd = trace_derivative_fd(a, b, f, p, HPReal(kPrec));
    CHECK(testing::relative_gap(closed, fd) < tol("1e-20"));
  }
}

TEST_CASE("matrix with known derivatives") {
  // A = [[2,1],[1,3]], B = [[1,1/2],[1/2,2]]
  Matrix<GaussianRational> am(2, 2), bm(2, 2);
  am(0, 0) = GaussianRational(2);
  am(0, 1) = am(1, 0) = GaussianRational(1);
  am(1, 1) = GaussianRational(3);
  bm(0, 0) = GaussianRational(1);
  bm(0, 1) = bm(1, 0) = GaussianRational(Rational(1, 2));
  bm(1, 1) = GaussianRational(2);
  const AnyFrame frame = to_eigenframe(AnyHermitian(ExactHermitian(am)), AnyHermitian(ExactHermitian(bm)), kPrec);
  const char* plus[] = {"84.1963523244094294475198531249244246711450635106525664308997",
                        "179.83292717379914322596363113103689386393042884375819005794",
                        "391.211055235460043267389850292194418698365024579081194869383"};
  const char* minus[] = {"-0.266448888541301975657085949008786415862708254940400692801348",
                         "0.30911971917676959154332211409666934105389728436029633993584",
                         "-0.455833158518438718445118137479897695421616038825733129847356"};
  for (int p = 1; p <= 3; ++p) {
    const HPReal up = trace_derivative(frame, FunctionSpec::exp(), p).approx();
    const HPReal down = trace_derivative(frame, FunctionSpec::exp(-1), p).approx();
    CHECK(testing::relative_gap(up, HPReal(plus[p - 1], kPrec)) < tol("1e-55"));
    CHECK(testing::relative_gap(down, HPReal(minus[p - 1], kPrec)) < tol("1e-55"));
  }
}

TEST_CASE("basis invariance") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    CounterRng rng(seed, 6);
    const std::size_t n = 3;
    const FloatFrame frame = to_float(
        testing::exact_frame(testing::distinct_positive(rng, n), testing::random_psd(rng, n)), kPrec + 32);
    const Matrix<HPComplex> u = random_unitary(rng, n);
    const FloatHermitian x(u * FloatHermitian::diagonal(frame.eigenvalues).matrix() * u.adjoint());
    const FloatHermitian h(u * frame.h.matrix() * u.adjoint());
    const FloatFrame rotated = to_eigenframe(x, h, kPrec);
    const FunctionSpec f = FunctionSpec::resolvent(Rational(1, 3));
    for (int p = 1; p <= 3; ++p) {
      CHECK(testing::relative_gap(trace_derivative<HPReal>(frame, f, p), trace_derivative<HPReal>(rotated, f, p)) <
            tol("1e-50"));
    }
  }
}

TEST_CASE("shift_frame") {
  CounterRng rng(3, 7);
  const ExactHermitian a = testing::random_positive_definite(rng, 3);
  const ExactHermitian b = testing::random_psd(rng, 3);
  const AnyFrame frame = to_eigenframe(AnyHermitian(a), AnyHermitian(b), kPrec);
  const FloatFrame base = to_float(frame, kPrec);
  const FloatFrame same = shift_frame(frame, 0, kPrec);
  for (std::size_t i = 0; i < 3; ++i) CHECK(abs(same.eigenvalues[i] - base.eigenvalues[i]) < tol("1e-70"));

  const AnyFrame flat = testing::exact_frame({1, 2, 5}, ExactHermitian::zero(3));
  const FloatFrame still = shift_frame(flat, 4, kPrec);
  CHECK(still.eigenvalues[2] == HPReal(5L, kPrec));
  CHECK(still.h.is_zero());

  const Rational t0(3, 4);
  const FloatFrame shifted = shift_frame(frame, t0, kPrec);
  Matrix<GaussianRational> direct = a.matrix();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) direct(i, j) += GaussianRational(t0) * b(i, j);
  const auto oracle = eigen_decompose(to_float(ExactHermitian(direct), kPrec + 32), kPrec + 32);
  for (std::size_t i = 0; i < 3; ++i) CHECK(abs(shifted.eigenvalues[i] - oracle.eigenvalues[i]) < tol("1e-60"));

  const FloatHermitian fa = to_float(a, kPrec);
  const FloatHermitian fb = to_float(b, kPrec);
  const HPReal fd = trace_derivative_fd(fa, fb, FunctionSpec::resolvent(0), 2, HPReal(t0, kPrec));
  CHECK(testing::relative_gap(trace_derivative<HPReal>(shifted, FunctionSpec::resolvent(0), 2), fd) < tol("1e-20"));
  CHECK_THROWS_AS(shift_frame(frame, -1, kPrec), DomainError);
}

TEST_CASE("complete monotonicity reports") {
  CounterRng rng(11, 9);
  const ExactHermitian a = testing::exact_diagonal({1, Rational(5, 2), 4});
  const ExactHermitian b = testing::random_psd(rng, 3);
  const std::vector<Rational> grid{0, Rational(1, 2), 1};
  const DerivativeReport exact = complete_monotonicity_report(a, b, FunctionSpec::monotone(0, {{1, 1}}), 5, grid);
  REQUIRE(exact.entries.size() == 15);
  CHECK(exact.alternates());
  for (const auto& e : exact.entries) {
    CHECK(e.certified == (e.t0 == 0));
    CHECK(e.value.is_exact() == (e.t0 == 0));
    CHECK(e.method == (e.t0 == 0 ? "loop-sum/exact" : "loop-sum/newton"));
  }

  // rank-one perturbation
  Matrix<GaussianRational> v(3, 3);
  const GaussianRational col[] = {GaussianRational(1), GaussianRational(Rational(1, 2), 1), GaussianRational(-2)};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) v(i, j) = col[i] * conj(col[j]);
  const ExactHermitian general = testing::random_positive_definite(rng, 3);
  const DerivativeReport rank_one =
      complete_monotonicity_report(general, ExactHermitian(v), FunctionSpec::exp(-1), 5, grid);
  CHECK(rank_one.alternates());
  for (const auto& e : rank_one.entries) {
    CHECK_FALSE(e.certified);
    CHECK(e.method == "loop-sum/opitz");
  }

  const DerivativeReport small = complete_monotonicity_report(
      testing::random_positive_definite(rng, 2), testing::random_psd(rng, 2), FunctionSpec::exp(-1), 5, grid);
  CHECK(small.alternates());

  const Rational negative[] = {Rational(-1)};
  CHECK_THROWS_AS(complete_monotonicity_report(a, b, FunctionSpec::exp(-1), 3, negative), DomainError);
}

TEST_CASE("caps and domain errors") {
  const ExactFrame frame = testing::exact_frame({1, 2}, identity(2));
  CHECK_THROWS_AS(trace_derivative<Rational>(frame, FunctionSpec::resolvent(0), 0), DomainError);
  CHECK_THROWS_AS(trace_derivative<Rational>(frame, FunctionSpec::resolvent(0), 9), RangeError);
  CHECK_NOTHROW(trace_derivative<Rational>(frame, FunctionSpec::resolvent(0), 9, kPrec, TraceLimits{9, 8}));
  const ExactFrame pole = testing::exact_frame({-1, 2}, identity(2));
  CHECK_THROWS_AS(trace_derivative<Rational>(pole, FunctionSpec::resolvent(0), 1), DomainError);
  CHECK_THROWS_AS(trace_derivative<Rational>(frame, FunctionSpec::exp(), 1), DomainError);
}

TEST_CASE("example frame third derivative") {
  const ExactFamily family = bmv_example_family(ExampleVariant::Original);
  const auto lambda = bmv_example_lambda();
  FloatFrame frame;
  for (const auto& m : lambda) frame.eigenvalues.push_back(m.value(kPrec + 64));
  Matrix<HPComplex> h(3, 3);
  const auto g = family.gram();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) h(i, j) = to_hp(g(i, j), kPrec + 64);
  frame.h = FloatHermitian(h);
  const HPReal closed = trace_derivative_exp(frame, -1, 3);
  const HPReal fd = trace_derivative_fd(FloatHermitian::diagonal(frame.eigenvalues), frame.h, FunctionSpec::exp(-1), 3,
                                        HPReal(kPrec), kPrec + 64);
  CHECK(testing::relative_gap(closed, fd) < tol("1e-8"));
  MESSAGE("-(1/3!) d^3/dt^3 tr exp(-(x + th)) at 0: " << (-closed / HPReal(6L, kPrec)).to_string(30));
}
