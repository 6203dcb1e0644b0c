#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "tracelap/json_io.hpp"
#include "tracelap/loops.hpp"

namespace tracelap {

enum class SearchMode { Random, Neighborhood };

struct SearchConfig {
  SearchMode mode = SearchMode::Random;

  // neighborhood mode
  ExactFamily seed_family;
  std::vector<Rational> seed_lambda;  ///< in units of ln 2
  long radius = 1;                    ///< entry moves are +-delta with 1 <= delta <= radius
  /// (vector, coordinate) pairs open to entry moves; empty means all.
  std::vector<std::pair<std::size_t, std::size_t>> perturb_entries;
  bool lambda_moves = true;

  // random mode
  std::size_t vectors = 3;
  std::size_t dimension = 3;
  double magnitude_log10_max = 6.0;  ///< entries are log-uniform in [1, 10^max]
  double negative_probability = 0.5;
  long lambda_max = 30;              ///< multipliers drawn from [0, lambda_max]
  Rational lambda_unit{3};           ///< lambda_k = lambda_unit * multiplier * ln 2

  std::vector<IntegrandPoint> points{{Rational(1), Rational(1), Rational(1, 3)}};
  std::uint64_t budget = 1000;  ///< evaluations (candidates x points)
  std::uint64_t seed = 0;
  std::filesystem::path output = "search.jsonl";
  std::filesystem::path checkpoint = "search.ckpt.json";
  std::uint64_t checkpoint_interval = 1000;
  Precision precision = kDefaultPrecision;
};

SearchConfig search_config_from_json(const Json& j);
Json to_json(const SearchConfig& config);

struct Candidate {
  ExactFamily family;
  std::vector<Log2Multiple> lambda;
};

/// Candidate number `index` (1-based) of the stream; depends only on (config, index).
Candidate generate_candidate(const SearchConfig& config, std::uint64_t index);

struct SearchRecord {
  std::uint64_t evaluation = 0;  ///< 1-based
  std::uint64_t candidate = 0;
  Candidate inputs;
  IntegrandPoint point;
  Number value;
};

Json to_json(const SearchRecord& record);

struct SearchSummary {
  std::uint64_t evaluations = 0;
  std::uint64_t negatives_found = 0;
  std::optional<SearchRecord> argmin;

  Json to_json() const;
};

struct RunOptions {
  int workers = 1;
  /// Stop (with a checkpoint) once this many evaluations exist in total.
  std::optional<std::uint64_t> stop_after;
};

/// Evaluates the triple integrand over the candidate stream, appending every
/// negative value and every new running minimum to the JSONL output, and
/// checkpointing every checkpoint_interval evaluations.  Starts a fresh output.
SearchSummary run_search(const SearchConfig& config, const RunOptions& options = {});

/// Continues from a checkpoint written by run_search.  The output is
/// truncated to the checkpointed size first, so a resumed run reproduces an
/// uninterrupted one byte for byte.
SearchSummary resume_search(const std::filesystem::path& checkpoint, const RunOptions& options = {});

}  // namespace tracelap
