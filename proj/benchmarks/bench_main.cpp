#include <benchmark/benchmark.h>

#include <filesystem>

#include "tracelap/divdiff.hpp"
#include "tracelap/formulations.hpp"
#include "tracelap/loops.hpp"
#include "tracelap/rng.hpp"
#include "tracelap/search.hpp"
#include "tracelap/traceder.hpp"

using namespace tracelap;

namespace {

constexpr Precision kPrec = 256;

std::vector<HPReal> nodes(int order) {
  CounterRng rng(1, static_cast<std::uint64_t>(order));
  std::vector<HPReal> x;
  for (int k = 0; k <= order; ++k) x.emplace_back(rng.uniform() * 4 - 2, kPrec);
  return x;
}

ExactHermitian lattice_psd(std::size_t n) {
  Matrix<GaussianRational> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = GaussianRational(Rational(static_cast<long>(n - (i > j ? i - j : j - i))));
  return ExactHermitian(m);
}

FloatFrame float_frame(std::size_t n) {
  FloatFrame f;
  for (std::size_t i = 0; i < n; ++i) f.eigenvalues.emplace_back(static_cast<long>(i + 1), kPrec);
  f.h = to_float(lattice_psd(n), kPrec);
  return f;
}

}  // namespace

static void BM_DivDiffRecursion(benchmark::State& state) {
  const auto x = nodes(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(divided_difference<HPReal>(FunctionSpec::exp(), x, kPrec));
}
BENCHMARK(BM_DivDiffRecursion)->DenseRange(2, 8, 3);

static void BM_DivDiffOpitz(benchmark::State& state) {
  const auto x = nodes(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(divdiff_exp_opitz(x, 1, kPrec));
}
BENCHMARK(BM_DivDiffOpitz)->DenseRange(2, 8, 3);

static void BM_DivDiffHermite(benchmark::State& state) {
  const auto x = nodes(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(divdiff_hermite_quadrature(FunctionSpec::exp(), x, 64, kPrec));
}
BENCHMARK(BM_DivDiffHermite)->DenseRange(2, 8, 3);

static void BM_TraceDerivativeExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<Rational> lambda;
  for (std::size_t i = 0; i < n; ++i) lambda.emplace_back(static_cast<long>(i + 1));
  const ExactFrame frame{lambda, lattice_psd(n)};
  const FunctionSpec f = FunctionSpec::monotone(0, {{Rational(1), Rational(1)}, {Rational(1, 2), Rational(3)}});
  const int p = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(trace_derivative<Rational>(frame, f, p, kPrec));
}
BENCHMARK(BM_TraceDerivativeExact)->Args({3, 4})->Args({4, 6})->Args({6, 6});

static void BM_TraceDerivativeExp(benchmark::State& state) {
  const FloatFrame frame = float_frame(static_cast<std::size_t>(state.range(0)));
  const int p = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(trace_derivative_exp(frame, -1, p, kPrec));
}
BENCHMARK(BM_TraceDerivativeExp)->Args({3, 3})->Args({4, 5});

static void BM_PolyCoefficients(benchmark::State& state) {
  const ExactHermitian a = lattice_psd(4);
  const ExactHermitian b = ExactHermitian::diagonal(std::vector<Rational>{1, 2, 3, 4});
  const int p = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(poly_coefficients(a, b, p));
}
BENCHMARK(BM_PolyCoefficients)->Arg(4)->Arg(8)->Arg(16);

static void BM_PolyOracle(benchmark::State& state) {
  const ExactHermitian a = lattice_psd(4);
  const ExactHermitian b = ExactHermitian::diagonal(std::vector<Rational>{1, 2, 3, 4});
  const int p = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(poly_coefficients_oracle(a, b, p));
}
BENCHMARK(BM_PolyOracle)->Arg(4)->Arg(8);

static void BM_ExampleIntegrand(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bmv_example(ExampleVariant::Original, kPrec));
}
BENCHMARK(BM_ExampleIntegrand);

static void BM_SearchThroughput(benchmark::State& state) {
  const auto dir = std::filesystem::temp_directory_path() / "tracelap-bench";
  std::filesystem::create_directories(dir);
  SearchConfig c;
  c.budget = 1000;
  c.output = dir / "out.jsonl";
  c.checkpoint = dir / "ckpt.json";
  RunOptions options;
  options.workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_search(c, options));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * c.budget));
}
BENCHMARK(BM_SearchThroughput)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
