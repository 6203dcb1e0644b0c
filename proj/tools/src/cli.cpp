#include "tracelap_cli/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>

#include "tracelap/divdiff.hpp"
#include "tracelap/errors.hpp"
#include "tracelap/formulations.hpp"
#include "tracelap/loops.hpp"
#include "tracelap/search.hpp"
#include "tracelap/traceder.hpp"

namespace tracelap::cli {

namespace {

struct Globals {
  Precision precision = default_precision();
  std::string mode = "exact-first";
  std::string format = "human";
  int digits = 40;
  bool quiet = false;

  bool json() const { return format == "json"; }
  Mode preferred() const { return mode == "float" ? Mode::Float : Mode::Exact; }
};

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw ParseError("empty item in list \"" + text + "\"");
    out.push_back(item.substr(first, last - first + 1));
  }
  if (out.empty()) throw ParseError("empty list");
  return out;
}

std::vector<Rational> rational_list(const std::string& text) {
  std::vector<Rational> out;
  for (const auto& item : split(text)) out.push_back(parse_rational(item));
  return out;
}

AnyHermitian load_matrix(const std::string& path, const Globals& g) {
  AnyHermitian m = matrix_from_json(read_json_file(path), g.precision + 32);
  if (g.preferred() == Mode::Float) return to_float(m, g.precision + 32);
  return m;
}

/// Prints `value` and the mode, either as two text lines or one JSON object.
void emit(std::ostream& out, const Globals& g, Json payload) {
  if (g.json()) {
    out << payload.dump() << '\n';
    return;
  }
  if (payload.contains("value")) {
    const Json& v = payload["value"];
    out << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    payload.erase("value");
  }
  if (g.quiet) return;
  for (auto it = payload.begin(); it != payload.end(); ++it) {
    out << it.key() << ": " << (it.value().is_string() ? it.value().get<std::string>() : it.value().dump()) << '\n';
  }
}

Json number_json(const Number& x, const Globals& g) { return to_json(x, x.is_exact() ? 0 : g.digits); }

void add_divdiff(CLI::App& app, Globals& g, std::ostream& out, std::function<void()>& action) {
  auto* sub = app.add_subcommand("divdiff", "Divided difference of f over a node list");
  auto func = std::make_shared<std::string>();
  auto nodes = std::make_shared<std::string>();
  auto method = std::make_shared<std::string>("recursion");
  auto points = std::make_shared<int>(64);
  sub->add_option("--func", *func, "exp[:s] | resolvent[:c] | monotone:beta[:c@w,...] | scaled:t:<f>")->required();
  sub->add_option("--nodes", *nodes, "comma separated rationals, repeats allowed")->required();
  sub->add_option("--method", *method, "recursion | opitz | hermite")
      ->check(CLI::IsMember({"recursion", "opitz", "hermite"}));
  sub->add_option("--quad-points", *points, "Gauss-Legendre points per axis (hermite)")->check(CLI::PositiveNumber);
  sub->callback([&, sub, func, nodes, method, points] {
    action = [&, func, nodes, method, points] {
      const FunctionSpec f = FunctionSpec::parse(*func);
      const std::vector<Rational> x = rational_list(*nodes);
      std::vector<HPReal> hx;
      for (const auto& q : x) hx.emplace_back(q, g.precision + 64);
      Number value;
      if (*method == "recursion") {
        value = divided_difference(f, x, g.preferred(), g.precision);
      } else if (*method == "opitz") {
        const auto sigma = f.exp_scale();
        if (!sigma) throw DomainError("the Opitz method here is implemented for exponentials only");
        value = divdiff_exp_opitz(hx, *sigma, g.precision);
      } else {
        value = divdiff_hermite_quadrature(f, hx, *points, g.precision);
      }
      emit(out, g, Json{{"value", number_json(value, g)}, {"mode", to_string(value.mode())}, {"method", *method}});
    };
  });
}

void add_trace_deriv(CLI::App& app, Globals& g, std::ostream& out, std::function<void()>& action) {
  auto* sub = app.add_subcommand("trace-deriv", "p-th derivative of t -> tr f(A + tB)");
  auto a = std::make_shared<std::string>();
  auto b = std::make_shared<std::string>();
  auto func = std::make_shared<std::string>();
  auto order = std::make_shared<int>(1);
  auto t0 = std::make_shared<std::string>("0");
  auto method = std::make_shared<std::string>("loop");
  sub->add_option("--A", *a, "matrix JSON file (positive definite)")->required();
  sub->add_option("--B", *b, "matrix JSON file (positive semi-definite)")->required();
  sub->add_option("--func", *func, "function spec")->required();
  sub->add_option("--order", *order, "derivative order p")->required()->check(CLI::PositiveNumber);
  sub->add_option("--t0", *t0, "expansion point (rational, >= 0)");
  sub->add_option("--method", *method, "loop | theorem | fd")->check(CLI::IsMember({"loop", "theorem", "fd"}));
  sub->callback([&, a, b, func, order, t0, method] {
    action = [&, a, b, func, order, t0, method] {
      const FunctionSpec f = FunctionSpec::parse(*func);
      const AnyHermitian ma = load_matrix(*a, g);
      const AnyHermitian mb = load_matrix(*b, g);
      const Rational shift = parse_rational(*t0);
      if (shift < 0) throw DomainError("--t0 must be >= 0");
      Number value;
      if (*method == "fd") {
        value = trace_derivative_fd(to_float(ma, g.precision + 32), to_float(mb, g.precision + 32), f, *order,
                                    HPReal(shift, g.precision + 32), g.precision);
      } else {
        const AnyFrame frame = to_eigenframe(ma, mb, g.precision + 32);
        const bool exact = shift == 0 && std::holds_alternative<ExactFrame>(frame) && f.exact_capable();
        if (exact) {
          const auto& ef = std::get<ExactFrame>(frame);
          value = *method == "theorem" ? trace_derivative_theorem_order<Rational>(ef, f, *order, g.precision)
                                       : trace_derivative<Rational>(ef, f, *order, g.precision);
        } else {
          const FloatFrame ff = shift_frame(frame, shift, g.precision + 32);
          if (*method == "theorem") {
            value = trace_derivative_theorem_order<HPReal>(ff, f, *order, g.precision);
          } else if (auto sigma = f.exp_scale()) {
            value = trace_derivative_exp(ff, *sigma, *order, g.precision);
          } else {
            value = trace_derivative<HPReal>(ff, f, *order, g.precision);
          }
        }
      }
      emit(out, g,
           Json{{"value", number_json(value, g)},
                {"mode", to_string(value.mode())},
                {"method", *method},
                {"sign", sign_symbol(classify_sign(value, g.precision))}});
    };
  });
}

void add_cm_check(CLI::App& app, Globals& g, std::ostream& out, std::function<void()>& action) {
  auto* sub = app.add_subcommand("cm-check", "Complete-monotonicity report over orders and a t grid (JSON)");
  auto a = std::make_shared<std::string>();
  auto b = std::make_shared<std::string>();
  auto func = std::make_shared<std::string>();
  auto max_order = std::make_shared<int>(4);
  auto grid = std::make_shared<std::string>("0");
  sub->add_option("--A", *a, "matrix JSON file")->required();
  sub->add_option("--B", *b, "matrix JSON file")->required();
  sub->add_option("--func", *func, "function spec")->required();
  sub->add_option("--max-order", *max_order, "largest derivative order")->check(CLI::PositiveNumber);
  sub->add_option("--grid", *grid, "comma separated t0 values");
  sub->callback([&, a, b, func, max_order, grid] {
    action = [&, a, b, func, max_order, grid] {
      const auto t = rational_list(*grid);
      const DerivativeReport report = complete_monotonicity_report(load_matrix(*a, g), load_matrix(*b, g),
                                                                   FunctionSpec::parse(*func), *max_order, t,
                                                                   g.precision);
      out << (g.json() ? to_json(report, g.digits).dump() : to_json(report, g.digits).dump(2)) << '\n';
    };
  });
}

ExactHermitian exact_matrix(const std::string& path, const Globals& g) {
  const AnyHermitian m = load_matrix(path, g);
  if (!std::holds_alternative<ExactHermitian>(m)) throw DomainError(path + ": exact matrix required");
  return std::get<ExactHermitian>(m);
}

void add_poly_coeff(CLI::App& app, Globals& g, std::ostream& out, std::function<void()>& action) {
  auto* sub = app.add_subcommand("poly-coeff", "Coefficients of t -> tr (A + tB)^p");
  auto a = std::make_shared<std::string>();
  auto b = std::make_shared<std::string>();
  auto p = std::make_shared<int>(2);
  auto oracle = std::make_shared<bool>(false);
  sub->add_option("--A", *a, "exact matrix JSON file")->required();
  sub->add_option("--B", *b, "exact matrix JSON file")->required();
  sub->add_option("--p", *p, "power")->required()->check(CLI::PositiveNumber);
  sub->add_flag("--oracle", *oracle, "enumerate all 2^p words instead");
  sub->callback([&, a, b, p, oracle] {
    action = [&, a, b, p, oracle] {
      const ExactHermitian ma = exact_matrix(*a, g);
      const ExactHermitian mb = exact_matrix(*b, g);
      const PolyCoefficients c = *oracle ? poly_coefficients_oracle(ma, mb, *p) : poly_coefficients(ma, mb, *p);
      Json j = to_json(c);
      std::string text;
      for (std::size_t k = 0; k < c.coeffs.size(); ++k) text += (k ? "," : "") + to_string(c.coeffs[k]);
      j["value"] = text;
      j.erase("coeffs");
      if (g.json()) j = to_json(c);
      emit(out, g, j);
    };
  });
}

void add_positive_type(CLI::App& app, Globals& g, std::ostream& out, std::function<void()>& action) {
  auto* sub = app.add_subcommand("positive-type", "Positive-type test of g(t) = tr exp(A + itB)");
  auto a = std::make_shared<std::string>();
  auto b = std::make_shared<std::string>();
  auto samples = std::make_shared<std::string>("0");
  sub->add_option("--A", *a, "matrix JSON file")->required();
  sub->add_option("--B", *b, "matrix JSON file")->required();
  sub->add_option("--samples", *samples, "comma separated sample points");
  sub->callback([&, a, b, samples] {
    action = [&, a, b, samples] {
      std::vector<HPReal> t;
      for (const auto& q : rational_list(*samples)) t.emplace_back(q, g.precision + 32);
      const auto report = positive_type_check(to_float(load_matrix(*a, g), g.precision + 32),
                                              to_float(load_matrix(*b, g), g.precision + 32), t, g.precision);
      emit(out, g, to_json(report, g.digits));
    };
  });
}

void add_m_positive(CLI::App& app, Globals& g, std::ostream& out, std::function<void()>& action) {
  auto* sub = app.add_subcommand("m-positive", "Sampling probe of m-positivity of t -> tr exp(A + tB)");
  auto a = std::make_shared<std::string>();
  auto b = std::make_shared<std::string>();
  auto alpha = std::make_shared<std::string>();
  auto probe = std::make_shared<MPositiveProbe>();
  sub->add_option("--A", *a, "matrix JSON file")->required();
  sub->add_option("--B", *b, "matrix JSON file")->required();
  sub->add_option("--alpha", *alpha, "interval half width (default 1/(2 max|B| k))");
  sub->add_option("--k", probe->k, "probe dimension")->check(CLI::PositiveNumber);
  sub->add_option("--count", probe->count, "number of probes")->check(CLI::PositiveNumber);
  sub->add_option("--seed", probe->seed, "random seed");
  sub->add_option("--workers", probe->workers, "threads")->check(CLI::PositiveNumber);
  sub->callback([&, a, b, alpha, probe] {
    action = [&, a, b, alpha, probe] {
      if (!alpha->empty()) probe->alpha = parse_rational(*alpha);
      const auto report = m_positive_check(to_float(load_matrix(*a, g), g.precision + 32),
                                           to_float(load_matrix(*b, g), g.precision + 32), *probe, g.precision);
      emit(out, g, to_json(report, g.digits));
    };
  });
}

void add_loop_bound(CLI::App& app, Globals& g, std::ostream& out, std::function<void()>& action) {
  auto* sub = app.add_subcommand("loop-bound", "Lower bound -cos^p(pi/p) of a p-loop of unit vectors");
  auto p = std::make_shared<int>(3);
  sub->add_option("--p", *p, "loop length")->required()->check(CLI::Range(2, 1 << 20));
  sub->callback([&, p] {
    action = [&, p] {
      const HPReal bound = loop_bound(*p, g.precision);
      const HPReal fan = canonical_loop(fan_family(*p, g.precision)).re;
      emit(out, g, Json{{"value", bound.to_string(g.digits)}, {"mode", "float"}, {"fan_loop", fan.to_string(g.digits)}});
    };
  });
}

void add_loop_search(CLI::App& app, Globals& g, std::ostream& out, std::function<void()>& action) {
  auto* sub = app.add_subcommand("loop-search", "Numerical minimum of the canonical p-loop");
  auto p = std::make_shared<int>(3);
  auto d = std::make_shared<int>(3);
  auto restarts = std::make_shared<int>(50);
  auto seed = std::make_shared<std::uint64_t>(0);
  sub->add_option("--p", *p, "loop length")->required()->check(CLI::Range(2, 64));
  sub->add_option("--dim", *d, "vector dimension")->check(CLI::Range(2, 64));
  sub->add_option("--restarts", *restarts, "random restarts")->check(CLI::PositiveNumber);
  sub->add_option("--seed", *seed, "random seed");
  sub->callback([&, p, d, restarts, seed] {
    action = [&, p, d, restarts, seed] {
      const auto result = loop_min_search(*p, *d, *restarts, *seed, g.precision);
      const HPReal bound = loop_bound(*p, g.precision);
      Json j{{"value", result.value.to_string(g.digits)},
             {"mode", "float"},
             {"bound", bound.to_string(g.digits)},
             {"gap_to_bound", (result.value - bound).to_string(6)},
             {"best_restart", result.best_restart}};
      if (g.json()) j["family"] = family_to_json(result.family, 20);
      emit(out, g, j);
    };
  });
}

std::vector<Log2Multiple> lambda_list(const std::string& text) {
  std::vector<Log2Multiple> out;
  for (const auto& q : rational_list(text)) out.push_back({q});
  return out;
}

IntegrandPoint point_from_text(const std::string& text) {
  const auto t = rational_list(text);
  if (t.size() != 3) throw ParseError("--point needs three values t1,t2,t3");
  IntegrandPoint p{t[0], t[1], t[2]};
  p.validate();
  return p;
}

void add_integrand(CLI::App& app, Globals& g, std::ostream& out, std::function<void()>& action) {
  auto* sub = app.add_subcommand("integrand", "Third-derivative integrand at a simplex point");
  auto family = std::make_shared<std::string>();
  auto lambda = std::make_shared<std::string>();
  auto point = std::make_shared<std::string>("1,1,1/3");
  sub->add_option("--family", *family, "vector family JSON file")->required();
  sub->add_option("--lambda", *lambda, "eigenvalues in units of ln 2, e.g. 69,33,0")->required();
  sub->add_option("--point", *point, "t1,t2,t3 with 0 <= t3 <= t2 <= t1 <= 1");
  sub->callback([&, family, lambda, point] {
    action = [&, family, lambda, point] {
      const auto l = lambda_list(*lambda);
      const auto v = triple_integrand(family_from_json(read_json_file(*family)), l, point_from_text(*point),
                                      g.precision);
      emit(out, g, Json{{"value", number_json(v.value, g)}, {"mode", to_string(v.mode)}});
    };
  });
}

void add_third_deriv(CLI::App& app, Globals& g, std::ostream& out, std::function<void()>& action) {
  auto* sub = app.add_subcommand("third-deriv", "-(1/3!) d^3/dt^3 tr exp(x - th) at 0, two ways");
  auto family = std::make_shared<std::string>();
  auto lambda = std::make_shared<std::string>();
  auto points = std::make_shared<int>(96);
  sub->add_option("--family", *family, "vector family JSON file (h = Gram matrix)")->required();
  sub->add_option("--lambda", *lambda, "eigenvalues in units of ln 2")->required();
  sub->add_option("--quad-points", *points, "Gauss-Legendre points per axis")->check(CLI::PositiveNumber);
  sub->callback([&, family, lambda, points] {
    action = [&, family, lambda, points] {
      const auto l = lambda_list(*lambda);
      const auto v = third_derivative_value(family_from_json(read_json_file(*family)), l, g.precision, *points);
      emit(out, g,
           Json{{"value", v.closed_form.to_string(g.digits)},
                {"mode", "float"},
                {"quadrature", v.quadrature.to_string(g.digits)},
                {"gap", v.gap.to_string(6)}});
    };
  });
}

void add_bmv_example(CLI::App& app, Globals& g, std::ostream& out, std::function<void()>& action) {
  auto* sub = app.add_subcommand("bmv-example", "Exact integrand value of the integer example");
  auto variant = std::make_shared<std::string>("original");
  sub->add_option("--variant", *variant, "original | modified (202139 -> 202138)")
      ->check(CLI::IsMember({"original", "modified"}));
  sub->callback([&, variant] {
    action = [&, variant] {
      const auto v = bmv_example(*variant == "original" ? ExampleVariant::Original : ExampleVariant::Modified,
                                 g.precision);
      emit(out, g, Json{{"value", number_json(v.value, g)}, {"mode", to_string(v.mode)}, {"variant", *variant}});
    };
  });
}

void add_search(CLI::App& app, Globals& g, std::ostream& out, std::function<void()>& action) {
  auto* sub = app.add_subcommand("search", "Deterministic search for negative integrand values");
  auto config = std::make_shared<std::string>();
  auto resume = std::make_shared<std::string>();
  auto options = std::make_shared<RunOptions>();
  auto stop_after = std::make_shared<std::uint64_t>(0);
  sub->add_option("--config", *config, "search config JSON");
  sub->add_option("--resume", *resume, "checkpoint JSON written by an earlier run");
  sub->add_option("--workers", options->workers, "threads")->check(CLI::PositiveNumber);
  sub->add_option("--stop-after", *stop_after, "stop after this many evaluations (checkpointed)");
  sub->callback([&, config, resume, options, stop_after] {
    action = [&, config, resume, options, stop_after] {
      if (*stop_after > 0) options->stop_after = *stop_after;
      SearchSummary summary;
      if (!resume->empty()) {
        summary = resume_search(*resume, *options);
      } else {
        if (config->empty()) throw ParseError("search needs --config or --resume");
        summary = run_search(search_config_from_json(read_json_file(*config)), *options);
      }
      out << (g.json() ? summary.to_json().dump() : summary.to_json().dump(2)) << '\n';
    };
  });
}

void add_selftest(CLI::App& app, Globals& g, std::ostream& out, int& status, std::function<void()>& action) {
  auto* sub = app.add_subcommand("selftest", "Reference-value suite");
  auto json = std::make_shared<bool>(false);
  auto overrides = std::make_shared<std::vector<std::string>>();
  sub->add_flag("--json", *json, "machine-readable pass/fail list");
  sub->add_option("--expect", *overrides, "override an expected value: name=value");
  sub->callback([&, json, overrides] {
    action = [&, json, overrides] {
      auto expectations = selftest_expectations();
      for (const auto& item : *overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || !expectations.contains(item.substr(0, eq))) {
          throw ParseError("--expect needs name=value with a known check name: " + item);
        }
        expectations[item.substr(0, eq)] = item.substr(eq + 1);
      }
      const auto checks = run_selftest(expectations, g.precision);
      bool all = true;
      Json list = Json::array();
      for (const auto& c : checks) {
        all = all && c.pass;
        list.push_back(Json{{"name", c.name}, {"pass", c.pass}, {"expected", c.expected}, {"actual", c.actual}});
      }
      if (*json || g.json()) {
        out << Json{{"pass", all}, {"checks", list}}.dump() << '\n';
      } else {
        for (const auto& c : checks) {
          out << (c.pass ? "PASS " : "FAIL ") << c.name << '\n';
          if (!c.pass) out << "  expected " << c.expected << "\n  actual   " << c.actual << '\n';
        }
      }
      status = all ? kOk : kNumerical;
    };
  });
}

}  // namespace

int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trace-function derivatives, divided differences and integrand search"};
  app.name(argv.empty() ? "tracelap" : argv.front());
  Globals g;
  app.add_option("--precision", g.precision, "working precision in bits (env TRACELAP_PRECISION)")
      ->check(CLI::Range(static_cast<unsigned>(kMinPrecision), 1U << 20));
  app.add_option("--prefer", g.mode, "exact-first | float")->check(CLI::IsMember({"exact-first", "float"}));
  app.add_option("--format", g.format, "human | json")->check(CLI::IsMember({"human", "json"}));
  app.add_option("--digits", g.digits, "significant digits for float output (0 = round trip)");
  app.add_flag("--quiet", g.quiet, "print only the value");
  app.require_subcommand(1);
  app.fallthrough();

  int status = kOk;
  std::function<void()> action;
  add_divdiff(app, g, out, action);
  add_trace_deriv(app, g, out, action);
  add_cm_check(app, g, out, action);
  add_poly_coeff(app, g, out, action);
  add_positive_type(app, g, out, action);
  add_m_positive(app, g, out, action);
  add_loop_bound(app, g, out, action);
  add_loop_search(app, g, out, action);
  add_integrand(app, g, out, action);
  add_third_deriv(app, g, out, action);
  add_bmv_example(app, g, out, action);
  add_search(app, g, out, action);
  add_selftest(app, g, out, status, action);

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (args.empty()) {
      err << app.help();
    } else {
      err << e.what() << '\n' << "run with --help for usage\n";
    }
    return kUsage;
  }

  try {
    if (action) action();
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const RangeError& e) {
    err << "range error: " << e.what() << '\n';
    return kNumerical;
  } catch (const ParseError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return status;
}

}  // namespace tracelap::cli
