#include "tracelap/search.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <thread>

#include "tracelap/errors.hpp"
#include "tracelap/rng.hpp"

namespace tracelap {

namespace {

const char* mode_name(SearchMode mode) { return mode == SearchMode::Random ? "random" : "neighborhood"; }

Json point_json(const IntegrandPoint& p) { return Json::array({to_string(p.t1), to_string(p.t2), to_string(p.t3)}); }

IntegrandPoint point_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("integrand point must be [t1, t2, t3]");
  IntegrandPoint p{rational_from_json(j[0]), rational_from_json(j[1]), rational_from_json(j[2])};
  p.validate();
  return p;
}

Json lambda_json(const std::vector<Log2Multiple>& lambda) {
  Json out = Json::array();
  for (const auto& m : lambda) out.push_back(to_string(m.coefficient));
  return out;
}

Int random_entry(CounterRng& rng, const SearchConfig& config) {
  const double magnitude = std::floor(std::pow(10.0, rng.uniform() * config.magnitude_log10_max));
  Int value(static_cast<long>(std::max(1.0, magnitude)));
  if (rng.bernoulli(config.negative_probability)) value = -value;
  return value;
}

}  // namespace

SearchConfig search_config_from_json(const Json& j) {
  SearchConfig c;
  try {
    const std::string mode = j.value("mode", "random");
    if (mode == "random") {
      c.mode = SearchMode::Random;
    } else if (mode == "neighborhood") {
      c.mode = SearchMode::Neighborhood;
    } else {
      throw ParseError("search mode must be \"random\" or \"neighborhood\"");
    }
    if (j.contains("seed_family")) c.seed_family = family_from_json(j.at("seed_family"));
    if (j.contains("seed_lambda")) {
      for (const auto& x : j.at("seed_lambda")) c.seed_lambda.push_back(rational_from_json(x));
    }
    c.radius = j.value("radius", c.radius);
    if (j.contains("perturb_entries")) {
      for (const auto& e : j.at("perturb_entries")) c.perturb_entries.emplace_back(e.at(0), e.at(1));
    }
    c.lambda_moves = j.value("lambda_moves", c.lambda_moves);
    c.vectors = j.value("vectors", c.vectors);
    c.dimension = j.value("dimension", c.dimension);
    c.magnitude_log10_max = j.value("magnitude_log10_max", c.magnitude_log10_max);
    c.negative_probability = j.value("negative_probability", c.negative_probability);
    c.lambda_max = j.value("lambda_max", c.lambda_max);
    if (j.contains("lambda_unit")) c.lambda_unit = rational_from_json(j.at("lambda_unit"));
    if (j.contains("points")) {
      c.points.clear();
      for (const auto& p : j.at("points")) c.points.push_back(point_from_json(p));
    }
    c.budget = j.value("budget", c.budget);
    c.seed = j.value("seed", c.seed);
    c.output = j.value("output", c.output.string());
    c.checkpoint = j.value("checkpoint", c.checkpoint.string());
    c.checkpoint_interval = j.value("checkpoint_interval", c.checkpoint_interval);
    c.precision = j.value("precision", c.precision);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed search config: ") + e.what());
  }
  if (c.budget == 0) throw DomainError("search budget must be > 0");
  if (c.radius < 0) throw DomainError("search radius must be >= 0");
  if (c.points.empty()) throw DomainError("search needs at least one integrand point");
  if (c.checkpoint_interval == 0) throw DomainError("checkpoint interval must be > 0");
  if (c.precision < kMinPrecision) throw DomainError("precision must be >= 64 bits");
  if (c.mode == SearchMode::Neighborhood) {
    c.seed_family.validate();
    if (c.seed_lambda.size() != c.seed_family.size()) throw DomainError("seed_lambda needs one entry per vector");
    for (const auto& [v, m] : c.perturb_entries) {
      if (v >= c.seed_family.size() || m >= c.seed_family.dim()) throw DomainError("perturb entry out of range");
    }
  } else if (c.vectors < 1 || c.dimension < 1) {
    throw DomainError("random mode needs vectors >= 1 and dimension >= 1");
  }
  return c;
}

Json to_json(const SearchConfig& c) {
  Json j;
  j["mode"] = mode_name(c.mode);
  if (c.mode == SearchMode::Neighborhood) {
    j["seed_family"] = family_to_json(c.seed_family);
    Json lambda = Json::array();
    for (const auto& q : c.seed_lambda) lambda.push_back(to_string(q));
    j["seed_lambda"] = std::move(lambda);
    j["radius"] = c.radius;
    Json entries = Json::array();
    for (const auto& [v, m] : c.perturb_entries) entries.push_back(Json::array({v, m}));
    j["perturb_entries"] = std::move(entries);
    j["lambda_moves"] = c.lambda_moves;
  } else {
    j["vectors"] = c.vectors;
    j["dimension"] = c.dimension;
    j["magnitude_log10_max"] = c.magnitude_log10_max;
    j["negative_probability"] = c.negative_probability;
    j["lambda_max"] = c.lambda_max;
    j["lambda_unit"] = to_string(c.lambda_unit);
  }
  Json points = Json::array();
  for (const auto& p : c.points) points.push_back(point_json(p));
  j["points"] = std::move(points);
  j["budget"] = c.budget;
  j["seed"] = c.seed;
  j["output"] = c.output.string();
  j["checkpoint"] = c.checkpoint.string();
  j["checkpoint_interval"] = c.checkpoint_interval;
  j["precision"] = c.precision;
  return j;
}

Candidate generate_candidate(const SearchConfig& config, std::uint64_t index) {
  if (index == 0) throw DomainError("candidate indices start at 1");
  CounterRng rng(config.seed, index);
  Candidate c;
  if (config.mode == SearchMode::Random) {
    for (std::size_t v = 0; v < config.vectors; ++v) {
      std::vector<GaussianRational> row;
      for (std::size_t m = 0; m < config.dimension; ++m) row.emplace_back(Rational(random_entry(rng, config)));
      c.family.vectors.push_back(std::move(row));
    }
    for (std::size_t v = 0; v < config.vectors; ++v) {
      c.lambda.push_back({config.lambda_unit * Rational(rng.integer(0, config.lambda_max))});
    }
    return c;
  }

  c.family = config.seed_family;
  for (const auto& q : config.seed_lambda) c.lambda.push_back({q});
  if (index == 1) return c;

  std::vector<std::pair<std::size_t, std::size_t>> entries = config.perturb_entries;
  if (entries.empty()) {
    for (std::size_t v = 0; v < c.family.size(); ++v)
      for (std::size_t m = 0; m < c.family.dim(); ++m) entries.emplace_back(v, m);
  }
  const std::size_t entry_moves = config.radius > 0 ? entries.size() : 0;
  const std::size_t lambda_moves = config.lambda_moves ? c.lambda.size() : 0;
  if (entry_moves + lambda_moves == 0) return c;
  const auto move = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(entry_moves + lambda_moves) - 1));
  if (move < entry_moves) {
    const auto [v, m] = entries[move];
    long delta = static_cast<long>(rng.integer(1, config.radius));
    if (rng.bernoulli(0.5)) delta = -delta;
    c.family.vectors[v][m].re += delta;
  } else {
    const std::size_t k = move - entry_moves;
    c.lambda[k].coefficient += rng.bernoulli(0.5) ? 1 : -1;
  }
  return c;
}

Json to_json(const SearchRecord& r) {
  return Json{{"evaluation", r.evaluation},
              {"candidate", r.candidate},
              {"family", family_to_json(r.inputs.family)["vectors"]},
              {"lambda", lambda_json(r.inputs.lambda)},
              {"point", point_json(r.point)},
              {"value", to_json(r.value)},
              {"mode", to_string(r.value.mode())}};
}

Json SearchSummary::to_json() const {
  Json j{{"evaluations", evaluations}, {"negatives_found", negatives_found}};
  if (argmin) {
    j["min_value"] = tracelap::to_json(argmin->value);
    j["argmin"] = tracelap::to_json(*argmin);
  } else {
    j["min_value"] = nullptr;
    j["argmin"] = nullptr;
  }
  return j;
}

namespace {

struct SearchState {
  std::uint64_t next = 1;  ///< next evaluation index
  SearchSummary summary;
  std::uintmax_t output_size = 0;
};

SearchRecord record_from_json(const Json& j, Precision prec) {
  SearchRecord r;
  r.evaluation = j.at("evaluation");
  r.candidate = j.at("candidate");
  r.inputs.family = family_from_json(j.at("family"));
  for (const auto& x : j.at("lambda")) r.inputs.lambda.push_back({rational_from_json(x)});
  r.point = point_from_json(j.at("point"));
  const std::string mode = j.at("mode");
  if (mode == "exact") {
    r.value = rational_from_json(j.at("value"));
  } else {
    r.value = HPReal(j.at("value").get<std::string>(), prec);
  }
  return r;
}

void write_checkpoint(const SearchConfig& config, const SearchState& state) {
  Json j{{"config", to_json(config)},
         {"next_evaluation", state.next},
         {"summary", state.summary.to_json()},
         {"output_size", state.output_size}};
  write_json_file(config.checkpoint, j);
}

SearchRecord evaluate(const SearchConfig& config, std::uint64_t evaluation) {
  const std::uint64_t per_candidate = config.points.size();
  SearchRecord r;
  r.evaluation = evaluation;
  r.candidate = (evaluation - 1) / per_candidate + 1;
  r.inputs = generate_candidate(config, r.candidate);
  r.point = config.points[(evaluation - 1) % per_candidate];
  r.value = triple_integrand(r.inputs.family, r.inputs.lambda, r.point, config.precision).value;
  return r;
}

SearchSummary run_from(const SearchConfig& config, SearchState state, const RunOptions& options) {
  std::ofstream out(config.output, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot open " + config.output.string());
  const int workers = std::max(1, options.workers);
  const std::uint64_t end = std::min(config.budget, options.stop_after.value_or(config.budget));
  const std::uint64_t chunk = std::max<std::uint64_t>(64, static_cast<std::uint64_t>(workers) * 16);

  while (state.next <= end) {
    const std::uint64_t chunk_end =
        std::min({end + 1, state.next + chunk, (state.next - 1) / config.checkpoint_interval * config.checkpoint_interval +
                                                   config.checkpoint_interval + 1});
    const std::uint64_t count = chunk_end - state.next;
    std::vector<std::optional<SearchRecord>> results(count);
    std::vector<std::exception_ptr> failures(workers);
    auto work = [&](int w) {
      try {
        for (std::uint64_t k = static_cast<std::uint64_t>(w); k < count; k += static_cast<std::uint64_t>(workers)) {
          results[k] = evaluate(config, state.next + k);
        }
      } catch (...) {
        failures[w] = std::current_exception();
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
      for (auto& t : pool) t.join();
    }
    for (auto& failure : failures)
      if (failure) std::rethrow_exception(failure);

    // Single writer, index order.
    for (auto& result : results) {
      SearchRecord& r = *result;
      const bool negative = r.value.sign() < 0;
      const bool new_min = !state.summary.argmin || r.value < state.summary.argmin->value;
      if (negative) ++state.summary.negatives_found;
      if (new_min) state.summary.argmin = r;
      if (negative || new_min) {
        Json line = to_json(r);
        line["kind"] = negative ? "negative" : "minimum";
        out << line.dump() << '\n';
      }
      ++state.summary.evaluations;
    }
    out.flush();
    if (!out) throw IoError("write failed for " + config.output.string());
    state.next = chunk_end;
    state.output_size = std::filesystem::file_size(config.output);
    if ((state.next - 1) % config.checkpoint_interval == 0 || state.next > end) write_checkpoint(config, state);
  }
  write_checkpoint(config, state);
  return state.summary;
}

}  // namespace

SearchSummary run_search(const SearchConfig& config, const RunOptions& options) {
  if (config.budget == 0) throw DomainError("search budget must be > 0");
  {
    std::ofstream truncate(config.output, std::ios::binary | std::ios::trunc);
    if (!truncate) throw IoError("cannot create " + config.output.string());
  }
  return run_from(config, SearchState{}, options);
}

SearchSummary resume_search(const std::filesystem::path& checkpoint, const RunOptions& options) {
  const Json j = read_json_file(checkpoint);
  SearchState state;
  SearchConfig config;
  try {
    config = search_config_from_json(j.at("config"));
    state.next = j.at("next_evaluation");
    state.output_size = j.at("output_size");
    const Json& summary = j.at("summary");
    state.summary.evaluations = summary.at("evaluations");
    state.summary.negatives_found = summary.at("negatives_found");
    if (!summary.at("argmin").is_null()) state.summary.argmin = record_from_json(summary.at("argmin"), config.precision);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("corrupt checkpoint " + checkpoint.string() + ": " + e.what());
  }
  if (state.next == 0 || state.summary.evaluations != state.next - 1) {
    throw ParseError("corrupt checkpoint " + checkpoint.string() + ": inconsistent counters");
  }
  config.checkpoint = checkpoint;
  if (!std::filesystem::exists(config.output)) throw IoError("search output " + config.output.string() + " is missing");
  if (std::filesystem::file_size(config.output) < state.output_size) {
    throw ParseError("search output is shorter than the checkpoint records");
  }
  std::filesystem::resize_file(config.output, state.output_size);
  return run_from(config, std::move(state), options);
}

}  // namespace tracelap
