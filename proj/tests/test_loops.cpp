#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tracelap/errors.hpp"
#include "tracelap/loops.hpp"

using namespace tracelap;

namespace {

constexpr Precision kPrec = 256;

HPReal tol(const char* text) { return HPReal(std::string_view(text), kPrec); }

ExactFamily integer_family(std::initializer_list<std::initializer_list<long>> rows) {
  ExactFamily family;
  for (const auto& row : rows) {
    std::vector<GaussianRational> v;
    for (long x : row) v.emplace_back(Rational(x));
    family.vectors.push_back(std::move(v));
  }
  return family;
}

std::vector<Log2Multiple> log2s(std::initializer_list<Rational> values) {
  std::vector<Log2Multiple> out;
  for (const auto& q : values) out.push_back({q});
  return out;
}

ExactFamily random_family(CounterRng& rng, std::size_t n, std::size_t d) {
  ExactFamily family;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<GaussianRational> v;
    for (std::size_t m = 0; m < d; ++m) v.emplace_back(testing::small_rational(rng), testing::small_rational(rng, 3, 2));
    family.vectors.push_back(std::move(v));
  }
  return family;
}

}  // namespace

TEST_CASE("loop values") {
  const ExactFamily unit = integer_family({{1, 0}, {0, 1}});
  const std::size_t same[] = {0, 0, 0};
  CHECK(loop_value(unit, std::span<const std::size_t>(same)) == GaussianRational(1));
  const std::size_t alternating[] = {0, 1};
  CHECK(loop_value(unit, std::span<const std::size_t>(alternating)) == GaussianRational(0));

  const FloatFamily fan = fan_family(3, kPrec);
  CHECK(abs(canonical_loop(fan).re + HPReal(Rational(1, 8), kPrec)) < tol("1e-70"));
  CHECK(abs(canonical_loop(fan).im) < tol("1e-70"));

  const std::size_t out_of_range[] = {0, 5};
  CHECK_THROWS(loop_value(unit, std::span<const std::size_t>(out_of_range)));
  ExactFamily empty;
  CHECK_THROWS_AS(empty.validate(), DomainError);
  ExactFamily ragged = integer_family({{1, 2}, {3}});
  CHECK_THROWS_AS(ragged.validate(), DomainError);
}

TEST_CASE("loop homogeneity and unitary invariance") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CounterRng rng(seed, 12);
    ExactFamily family = random_family(rng, 4, 3);
    const GaussianRational before = canonical_loop(family);
    const Rational s = testing::positive_rational(rng);
    const auto k = static_cast<std::size_t>(rng.integer(0, 3));
    for (auto& x : family.vectors[k]) x = x * GaussianRational(s);
    CHECK(canonical_loop(family) == before * GaussianRational(s * s));

    // Common unitary: a real rotation in coordinates (0, 1) by a Pythagorean angle
    // and a phase on coordinate 2.
    ExactFamily rotated = family;
    const Rational c(3, 5), sn(4, 5);
    for (auto& v : rotated.vectors) {
      const GaussianRational x = v[0], y = v[1];
      v[0] = GaussianRational(c) * x - GaussianRational(sn) * y;
      v[1] = GaussianRational(sn) * x + GaussianRational(c) * y;
      v[2] = v[2] * GaussianRational(Rational(5, 13), Rational(12, 13));
    }
    CHECK(canonical_loop(rotated) == canonical_loop(family));
  }
}

TEST_CASE("loop bound") {
  CHECK(abs(loop_bound(2, kPrec)) < tol("1e-70"));
  CHECK(abs(loop_bound(3, kPrec) + HPReal(Rational(1, 8), kPrec)) < tol("1e-70"));
  CHECK(abs(loop_bound(4, kPrec) + HPReal(Rational(1, 4), kPrec)) < tol("1e-70"));
  CHECK(abs(loop_bound(6, kPrec) + HPReal(Rational(27, 64), kPrec)) < tol("1e-70"));
  const HPReal bound5("-0.346567810742171070031966692869630955893798309344650447208664", kPrec);
  CHECK(abs(loop_bound(5, kPrec) - bound5) < tol("1e-58"));
  HPReal previous = loop_bound(3, kPrec);
  for (int p : {10, 100, 1000}) {
    const HPReal b = loop_bound(p, kPrec);
    CHECK(b < previous);
    CHECK(b > HPReal(-1L, kPrec));
    previous = b;
  }
  CHECK_THROWS_AS(loop_bound(1, kPrec), DomainError);
}

TEST_CASE("fan family") {
  for (int p = 2; p <= 9; ++p) {
    const FloatFamily fan = fan_family(p, kPrec);
    REQUIRE(fan.size() == static_cast<std::size_t>(p));
    for (std::size_t i = 0; i < fan.size(); ++i) CHECK(abs(fan.inner(i, i).re - HPReal(1L, kPrec)) < tol("1e-70"));
    CHECK(abs(canonical_loop(fan).re - loop_bound(p, kPrec)) < tol("1e-60"));
  }
}

TEST_CASE("loop minimum search") {
  const LoopSearchResult r3 = loop_min_search(3, 3, 50, 1, kPrec);
  CHECK(r3.restarts == 50);
  CHECK(r3.value >= loop_bound(3, kPrec) - tol("1e-12"));
  CHECK(abs(r3.value - loop_bound(3, kPrec)) < tol("1e-9"));
  const LoopSearchResult r2 = loop_min_search(2, 3, 10, 2, kPrec);
  CHECK(r2.value >= HPReal(kPrec));
  const LoopSearchResult r5 = loop_min_search(5, 5, 30, 3, kPrec);
  CHECK(r5.value >= loop_bound(5, kPrec) - tol("1e-12"));
  CHECK(abs(r5.value - loop_bound(5, kPrec)) < tol("1e-9"));
  for (std::size_t i = 0; i < r5.family.size(); ++i) {
    CHECK(abs(r5.family.inner(i, i).re - HPReal(1L, kPrec)) < tol("1e-60"));
  }
  CHECK(abs(canonical_loop(r5.family).re - r5.value) < tol("1e-60"));

  const LoopSearchResult again = loop_min_search(5, 5, 30, 3, kPrec);
  CHECK(again.value == r5.value);
  CHECK_THROWS_AS(loop_min_search(3, 1, 5, 0, kPrec), DomainError);
}

TEST_CASE("integrand point ordering") {
  CHECK_NOTHROW((IntegrandPoint{1, Rational(1, 2), 0}.validate()));
  CHECK_THROWS_AS((IntegrandPoint{Rational(1, 2), 1, 0}.validate()), DomainError);
  CHECK_THROWS_AS((IntegrandPoint{2, 1, 0}.validate()), DomainError);
  CHECK_THROWS_AS((IntegrandPoint{1, 0, -1}.validate()), DomainError);
}

TEST_CASE("triple integrand basics") {
  const ExactFamily one = integer_family({{1}});
  for (const IntegrandPoint& point : {IntegrandPoint{1, 1, Rational(1, 3)}, IntegrandPoint{Rational(1, 2), 0, 0}}) {
    const IntegrandValue v = triple_integrand(one, log2s({0}), point, kPrec);
    CHECK(v.mode == Mode::Exact);
    CHECK(v.value == Number(Rational(1)));
  }

  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    CounterRng rng(seed, 13);
    const ExactFamily family = random_family(rng, 3, 2);
    const IntegrandValue v = triple_integrand(family, log2s({0, 0, 0}), {1, Rational(2, 3), Rational(1, 5)}, kPrec);
    REQUIRE(v.mode == Mode::Exact);
    const auto g = family.gram();
    CHECK(v.value.exact() == (g * g * g).trace().re);
    CHECK(v.value.exact() >= 0);
  }

  const ExactFamily pair = integer_family({{2, 1}, {-1, 3}});
  const IntegrandValue exact = triple_integrand(pair, log2s({3, 1}), {1, Rational(1, 2), 0}, kPrec);
  CHECK(exact.mode == Mode::Exact);
  CHECK(exact.value.exact().get_den() == 1);
  const IntegrandValue inexact = triple_integrand(pair, log2s({Rational(1, 3), 1}), {1, Rational(1, 2), 0}, kPrec);
  CHECK(inexact.mode == Mode::Float);

  std::vector<HPReal> lambda{Log2Multiple{Rational(1, 3)}.value(kPrec), const_ln2(kPrec)};
  const HPReal float_value = triple_integrand(to_float(pair, kPrec), lambda, HPReal(1L, kPrec), HPReal("0.5", kPrec),
                                              HPReal(kPrec), kPrec);
  CHECK(testing::relative_gap(float_value, inexact.value.to_hp(kPrec)) < tol("1e-60"));
  CHECK_THROWS_AS(triple_integrand(pair, log2s({1}), {1, 1, 0}, kPrec), DomainError);
}

TEST_CASE("third derivative two routes") {
  const ExactFamily zero = integer_family({{0, 0}, {0, 0}});
  const ThirdDerivativeValue z = third_derivative_value(zero, log2s({1, 2}), kPrec, 16);
  CHECK(z.closed_form.is_zero());
  CHECK(z.quadrature.is_zero());

  const ExactFamily scalar = integer_family({{3}});
  const ThirdDerivativeValue s = third_derivative_value(scalar, log2s({2}), kPrec, 16);
  // -(1/3!) d^3/dt^3 e^{l - 9t} = 9^3 e^l / 6
  const HPReal expected = HPReal(729L, kPrec) * HPReal(4L, kPrec) / HPReal(6L, kPrec);
  CHECK(testing::relative_gap(s.closed_form, expected) < tol("1e-60"));
  CHECK(testing::relative_gap(s.quadrature, expected) < tol("1e-60"));

  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    CounterRng rng(seed, 14);
    const ExactFamily family = random_family(rng, 3, 3);
    const auto lambda = log2s({testing::small_rational(rng), testing::small_rational(rng), 0});
    const ThirdDerivativeValue v = third_derivative_value(family, lambda, kPrec, 48);
    CHECK(testing::relative_gap(v.closed_form, v.quadrature) < tol("1e-30"));
  }
}

TEST_CASE("example third derivative two routes") {
  const ThirdDerivativeValue v =
      third_derivative_value(bmv_example_family(ExampleVariant::Original), bmv_example_lambda(), kPrec);
  CHECK(testing::relative_gap(v.closed_form, v.quadrature) < tol("1e-20"));
  MESSAGE("example -(1/3!) d^3/dt^3 tr exp(x - th): " << v.closed_form.to_string(30));
}

TEST_CASE("example inputs") {
  const ExactFamily original = bmv_example_family(ExampleVariant::Original);
  const ExactFamily modified = bmv_example_family(ExampleVariant::Modified);
  CHECK(original.vectors[2][2] == GaussianRational(Rational(202139)));
  CHECK(modified.vectors[2][2] == GaussianRational(Rational(202138)));
  CHECK(bmv_example_lambda() == log2s({69, 33, 0}));
  const IntegrandValue v = bmv_example(ExampleVariant::Original, kPrec);
  REQUIRE(v.mode == Mode::Exact);
  CHECK(v.value.exact().get_den() == 1);
  CHECK(v.value == triple_integrand(original, bmv_example_lambda(), bmv_example_point(), kPrec).value);
}

TEST_CASE("golden example integers") {
  const IntegrandValue original = bmv_example(ExampleVariant::Original, kPrec);
  const IntegrandValue modified = bmv_example(ExampleVariant::Modified, kPrec);
  REQUIRE(original.mode == Mode::Exact);
  REQUIRE(modified.mode == Mode::Exact);
  CHECK(original.value.exact() == parse_rational("-487062506352658941731358505750"));
  CHECK(modified.value.exact() == parse_rational("376189230591238013538921396773"));
}
