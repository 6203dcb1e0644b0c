#include <cmath>

#include "tracelap/formulations.hpp"
#include "tracelap/loops.hpp"
#include "tracelap/traceder.hpp"
#include "tracelap_cli/cli.hpp"

namespace tracelap::cli {

std::map<std::string, std::string> selftest_expectations() {
  return {
      {"example-original", "-487062506352658941731358505750"},
      {"example-modified", "376189230591238013538921396773"},
      {"poly-coeff", "5,6,4"},
      {"fan-loop-3", "-1/8"},
      {"resolvent-first-derivative", "-5/4"},
      {"resolvent-alternation", "+,+,+,+,+,+"},
  };
}

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? "," : "") + parts[k];
  return out;
}

}  // namespace

std::vector<SelftestCheck> run_selftest(const std::map<std::string, std::string>& expectations, Precision prec) {
  std::vector<SelftestCheck> checks;
  auto add = [&](const std::string& name, const std::string& actual) {
    SelftestCheck c;
    c.name = name;
    c.expected = expectations.at(name);
    c.actual = actual;
    c.pass = c.expected == c.actual;
    checks.push_back(std::move(c));
  };
  auto guarded = [&](const std::string& name, auto&& compute) {
    try {
      add(name, compute());
    } catch (const std::exception& e) {
      add(name, std::string("error: ") + e.what());
    }
  };

  guarded("example-original", [&] { return bmv_example(ExampleVariant::Original, prec).value.to_string(); });
  guarded("example-modified", [&] { return bmv_example(ExampleVariant::Modified, prec).value.to_string(); });
  guarded("poly-coeff", [&] {
    const ExactHermitian a = ExactHermitian::diagonal(std::vector<Rational>{1, 2});
    Matrix<GaussianRational> ones(2, 2, GaussianRational(1));
    const auto c = poly_coefficients(a, ExactHermitian(ones), 2);
    std::vector<std::string> parts;
    for (const auto& q : c.coeffs) parts.push_back(to_string(q));
    return join(parts);
  });
  guarded("fan-loop-3", [&] {
    // Compared against -1/8 to 30 digits.
    const HPReal value = canonical_loop(fan_family(3, prec)).re;
    const HPReal gap = abs(value - HPReal(Rational(-1, 8), prec));
    return gap < HPReal("1e-30", prec) ? std::string("-1/8") : value.to_string(40);
  });
  guarded("resolvent-first-derivative", [&] {
    ExactFrame frame;
    frame.eigenvalues = {1, 2};
    frame.h = ExactHermitian::diagonal(std::vector<Rational>{1, 1});
    return to_string(trace_derivative<Rational>(frame, FunctionSpec::resolvent(0), 1, prec));
  });
  guarded("resolvent-alternation", [&] {
    Matrix<GaussianRational> h(3, 3);
    const GaussianRational xi[3] = {GaussianRational(1), GaussianRational(Rational(2), Rational(1)),
                                    GaussianRational(Rational(-1, 2))};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) h(i, j) = xi[i] * conj(xi[j]);
    for (int i = 0; i < 3; ++i) h(i, i) += GaussianRational(1);
    ExactFrame frame;
    frame.eigenvalues = {Rational(1, 2), 1, 3};
    frame.h = ExactHermitian(h);
    std::vector<std::string> signs;
    for (int p = 1; p <= 6; ++p) {
      Rational v = trace_derivative<Rational>(frame, FunctionSpec::resolvent(1), p, prec);
      if (p % 2 != 0) v = -v;
      signs.push_back(v > 0 ? "+" : v < 0 ? "-" : "0");
    }
    return join(signs);
  });
  return checks;
}

}  // namespace tracelap::cli
