#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "tracelap/formulations.hpp"
#include "tracelap/loops.hpp"
#include "tracelap/traceder.hpp"

namespace tracelap {

using Json = nlohmann::ordered_json;

/// Accepts "p/q" / decimal strings and JSON integers.
Rational rational_from_json(const Json& j);
/// Rational string in exact mode, decimal string otherwise.
Json to_json(const Number& x, int digits = 0);
Json to_json(const HPReal& x, int digits = 0);

/// {"n": n, "mode": "exact"|"float", "entries": [[{"re": .., "im": ..}]]}.
/// Entries may also be bare scalars (imaginary part zero).
AnyHermitian matrix_from_json(const Json& j, Precision prec = default_precision());
Json matrix_to_json(const AnyHermitian& m, int digits = 0);

/// {"vectors": [[..]], "weights": [..]} with scalar or {re, im} entries; exact only.
ExactFamily family_from_json(const Json& j);
Json family_to_json(const ExactFamily& family);
Json family_to_json(const FloatFamily& family, int digits = 0);

/// {"log2_coeff": "p/q"} or a bare rational.
Log2Multiple log2_from_json(const Json& j);
Json to_json(const Log2Multiple& m);

Json to_json(const DerivativeReport& report, int digits = 0);
Json to_json(const PolyCoefficients& coefficients);
Json to_json(const PositiveTypeReport& report, int digits = 0);
Json to_json(const MPositiveReport& report, int digits = 0);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

std::string sign_symbol(int sign);

}  // namespace tracelap
