#include "tracelap/json_io.hpp"

#include <fstream>
#include <sstream>

#include "tracelap/errors.hpp"

namespace tracelap {

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(Int(std::to_string(j.get<long long>())));
  if (j.is_number_unsigned()) return Rational(Int(std::to_string(j.get<unsigned long long>())));
  if (j.is_number_float()) {
    // Shortest round-trip text of the double, then exact parsing.
    std::ostringstream text;
    text.precision(17);
    text << j.get<double>();
    return parse_rational(text.str());
  }
  throw ParseError("expected a rational, got " + j.dump());
}

Json to_json(const HPReal& x, int digits) { return x.to_string(digits); }

Json to_json(const Number& x, int digits) {
  if (x.is_exact()) return to_string(x.exact());
  return x.approx().to_string(digits);
}

namespace {

GaussianRational exact_entry(const Json& j) {
  if (j.is_object()) {
    return {j.contains("re") ? rational_from_json(j.at("re")) : Rational(0),
            j.contains("im") ? rational_from_json(j.at("im")) : Rational(0)};
  }
  return GaussianRational(rational_from_json(j));
}

HPReal float_scalar(const Json& j, Precision prec) {
  if (j.is_string()) return HPReal(j.get<std::string>(), prec);
  if (j.is_number()) return HPReal(j.get<double>(), prec);
  throw ParseError("expected a decimal, got " + j.dump());
}

HPComplex float_entry(const Json& j, Precision prec) {
  if (j.is_object()) {
    return {j.contains("re") ? float_scalar(j.at("re"), prec) : HPReal(prec),
            j.contains("im") ? float_scalar(j.at("im"), prec) : HPReal(prec)};
  }
  return HPComplex(float_scalar(j, prec));
}

Json complex_json(const GaussianRational& z) { return Json{{"re", to_string(z.re)}, {"im", to_string(z.im)}}; }
Json complex_json(const HPComplex& z, int digits) {
  return Json{{"re", z.re.to_string(digits)}, {"im", z.im.to_string(digits)}};
}

}  // namespace

AnyHermitian matrix_from_json(const Json& j, Precision prec) {
  try {
    const Json& entries = j.is_array() ? j : j.at("entries");
    const std::string mode = j.is_object() && j.contains("mode") ? j.at("mode").get<std::string>() : "exact";
    const std::size_t n = entries.size();
    if (j.is_object() && j.contains("n") && j.at("n").get<std::size_t>() != n) {
      throw ParseError("matrix \"n\" does not match the number of rows");
    }
    for (const auto& row : entries) {
      if (!row.is_array() || row.size() != n) throw ParseError("matrix must be square");
    }
    if (mode == "exact") {
      Matrix<GaussianRational> m(n, n);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) m(r, c) = exact_entry(entries[r][c]);
      return ExactHermitian(std::move(m));
    }
    if (mode == "float") {
      Matrix<HPComplex> m(n, n);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) m(r, c) = float_entry(entries[r][c], prec);
      return FloatHermitian(std::move(m));
    }
    throw ParseError("matrix mode must be \"exact\" or \"float\"");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed matrix JSON: ") + e.what());
  }
}

Json matrix_to_json(const AnyHermitian& m, int digits) {
  Json out;
  out["n"] = dim_of(m);
  out["mode"] = to_string(mode_of(m));
  Json rows = Json::array();
  std::visit(
      [&](const auto& h) {
        for (std::size_t r = 0; r < h.dim(); ++r) {
          Json row = Json::array();
          for (std::size_t c = 0; c < h.dim(); ++c) {
            if constexpr (std::is_same_v<std::decay_t<decltype(h)>, ExactHermitian>) {
              row.push_back(complex_json(h(r, c)));
            } else {
              row.push_back(complex_json(h(r, c), digits));
            }
          }
          rows.push_back(std::move(row));
        }
      },
      m);
  out["entries"] = std::move(rows);
  return out;
}

ExactFamily family_from_json(const Json& j) {
  try {
    const Json& vectors = j.is_array() ? j : j.at("vectors");
    ExactFamily family;
    for (const auto& v : vectors) {
      std::vector<GaussianRational> row;
      for (const auto& x : v) row.push_back(exact_entry(x));
      family.vectors.push_back(std::move(row));
    }
    if (j.is_object() && j.contains("weights")) {
      for (const auto& w : j.at("weights")) family.weights.push_back(rational_from_json(w));
    }
    family.validate();
    return family;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed family JSON: ") + e.what());
  }
}

Json family_to_json(const ExactFamily& family) {
  Json vectors = Json::array();
  for (const auto& v : family.vectors) {
    Json row = Json::array();
    for (const auto& z : v) row.push_back(z.im == 0 ? Json(to_string(z.re)) : complex_json(z));
    vectors.push_back(std::move(row));
  }
  Json out{{"mode", "exact"}, {"vectors", std::move(vectors)}};
  if (!family.weights.empty()) {
    Json weights = Json::array();
    for (const auto& w : family.weights) weights.push_back(to_string(w));
    out["weights"] = std::move(weights);
  }
  return out;
}

Json family_to_json(const FloatFamily& family, int digits) {
  Json vectors = Json::array();
  for (const auto& v : family.vectors) {
    Json row = Json::array();
    for (const auto& z : v) row.push_back(z.im.is_zero() ? Json(z.re.to_string(digits)) : complex_json(z, digits));
    vectors.push_back(std::move(row));
  }
  return Json{{"mode", "float"}, {"vectors", std::move(vectors)}};
}

Log2Multiple log2_from_json(const Json& j) {
  if (j.is_object()) return {rational_from_json(j.at("log2_coeff"))};
  return {rational_from_json(j)};
}

Json to_json(const Log2Multiple& m) { return Json{{"log2_coeff", to_string(m.coefficient)}}; }

std::string sign_symbol(int sign) { return sign > 0 ? "+" : sign < 0 ? "-" : "0"; }

Json to_json(const DerivativeReport& report, int digits) {
  Json entries = Json::array();
  for (const auto& e : report.entries) {
    entries.push_back(Json{{"t0", to_string(e.t0)},
                           {"p", e.p},
                           {"value", to_json(e.value, digits)},
                           {"sign", sign_symbol(e.sign)},
                           {"certified", e.certified},
                           {"mode", to_string(e.value.mode())},
                           {"method", e.method}});
  }
  return Json{{"function", report.function},
              {"tolerance", report.tolerance.to_string(6)},
              {"alternates", report.alternates()},
              {"entries", std::move(entries)}};
}

Json to_json(const PolyCoefficients& coefficients) {
  Json list = Json::array();
  for (const auto& c : coefficients.coeffs) list.push_back(to_string(c));
  return Json{{"mode", "exact"},
              {"p", coefficients.p},
              {"coeffs", std::move(list)},
              {"all_nonnegative", coefficients.all_nonnegative()}};
}

Json to_json(const PositiveTypeReport& report, int digits) {
  Json samples = Json::array();
  for (const auto& t : report.samples) samples.push_back(t.to_string(digits));
  return Json{{"mode", "float"},
              {"samples", std::move(samples)},
              {"min_eigenvalue", report.min_eigenvalue.to_string(digits)},
              {"tolerance", report.tolerance.to_string(6)},
              {"pass", report.pass}};
}

Json to_json(const MPositiveReport& report, int digits) {
  return Json{{"mode", "float"},
              {"alpha", report.alpha.to_string(digits)},
              {"k", report.k},
              {"count", report.count},
              {"seed", report.seed},
              {"min_entry", report.min_entry.to_string(digits)},
              {"argmin_sample", report.argmin_sample},
              {"tolerance", report.tolerance.to_string(6)},
              {"pass", report.pass}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  const std::filesystem::path temporary = path.string() + ".tmp";
  {
    std::ofstream out(temporary, std::ios::trunc);
    if (!out) throw IoError("cannot write " + temporary.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + temporary.string());
  }
  std::filesystem::rename(temporary, path);
}

}  // namespace tracelap
