#include <doctest.h>

#include <sstream>

#include "support.hpp"
#include "tracelap_cli/cli.hpp"

using namespace tracelap;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "tracelap");
  std::ostringstream out, err;
  Run r;
  r.code = cli::dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

Json run_json(std::vector<std::string> args) {
  args.insert(args.begin(), "--format=json");
  const Run r = run(std::move(args));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  return Json::parse(r.out);
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::string write(const std::filesystem::path& dir, const std::string& name, const Json& j) {
  const auto path = dir / name;
  write_json_file(path, j);
  return path.string();
}

}  // namespace

TEST_CASE("usage errors") {
  const Run none = run({});
  CHECK(none.code == cli::kUsage);
  CHECK(none.err.find("divdiff") != std::string::npos);
  CHECK(run({"no-such-command"}).code == cli::kUsage);
  CHECK(run({"divdiff", "--nodes", "1,2"}).code == cli::kUsage);
  CHECK(run({"divdiff", "--func", "cosine", "--nodes", "1,2"}).code == cli::kUsage);
  CHECK(run({"--precision", "32", "loop-bound", "--p", "3"}).code == cli::kUsage);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("divdiff subcommand") {
  const Run r = run({"divdiff", "--func", "resolvent:0", "--nodes", "1,2,3"});
  CHECK(r.code == 0);
  CHECK(first_line(r.out) == "1/6");
  CHECK(r.out.find("mode: exact") != std::string::npos);

  const Json j = run_json({"divdiff", "--func", "exp", "--nodes", "0,1,2", "--method", "opitz"});
  CHECK(j.at("mode") == "float");
  CHECK(testing::relative_gap(HPReal(j.at("value").get<std::string>(), 256),
                              HPReal("1.4762462210062798782549262589348414088329106915759640870766", 256)) <
        HPReal("1e-38", 256));

  const Json forced = run_json({"--prefer", "float", "divdiff", "--func", "resolvent:0", "--nodes", "1,2,3"});
  CHECK(forced.at("mode") == "float");
  CHECK(run({"divdiff", "--func", "resolvent:0", "--nodes", "-1,2"}).code == cli::kDomain);

  const Run quiet = run({"--quiet", "divdiff", "--func", "resolvent:1", "--nodes", "1"});
  CHECK(quiet.out == "1/2\n");
}

TEST_CASE("matrix subcommands") {
  const auto dir = testing::scratch_dir("cli-matrices");
  const std::string a = write(dir, "a.json", Json{{"n", 2}, {"mode", "exact"}, {"entries", Json::array({Json::array({"1", "0"}), Json::array({"0", "2"})})}});
  const std::string b = write(dir, "b.json", Json::array({{1, 0}, {0, 1}}));
  const std::string ones = write(dir, "ones.json", Json::array({{1, 1}, {1, 1}}));
  const std::string bad = write(dir, "bad.json", Json::array({{1, 2}, {0, 1}}));
  const std::string indefinite = write(dir, "neg.json", Json::array({{-1, 0}, {0, 1}}));

  const Run first = run({"trace-deriv", "--A", a, "--B", b, "--func", "resolvent:0", "--order", "1"});
  CHECK(first.code == 0);
  CHECK(first_line(first.out) == "-5/4");

  const Json fd = run_json({"trace-deriv", "--A", a, "--B", b, "--func", "resolvent:0", "--order", "1", "--method", "fd"});
  CHECK(fd.at("mode") == "float");
  CHECK(abs(HPReal(fd.at("value").get<std::string>(), 256) + HPReal("1.25", 256)) < HPReal("1e-30", 256));
  const Json theorem =
      run_json({"trace-deriv", "--A", a, "--B", ones, "--func", "monotone:0:1@2", "--order", "3", "--method", "theorem"});
  const Json loop = run_json({"trace-deriv", "--A", a, "--B", ones, "--func", "monotone:0:1@2", "--order", "3"});
  CHECK(theorem.at("value") == loop.at("value"));
  CHECK(run({"trace-deriv", "--A", bad, "--B", b, "--func", "exp", "--order", "1"}).code == cli::kDomain);
  CHECK(run({"trace-deriv", "--A", indefinite, "--B", b, "--func", "exp:-1", "--order", "1"}).code == cli::kDomain);
  CHECK(run({"trace-deriv", "--A", (dir / "missing.json").string(), "--B", b, "--func", "exp", "--order", "1"}).code ==
        cli::kUsage);

  const Json report =
      run_json({"cm-check", "--A", a, "--B", ones, "--func", "resolvent:0", "--max-order", "4", "--grid", "0,1/2"});
  REQUIRE(report.at("entries").size() == 8);
  for (const auto& e : report.at("entries")) {
    CHECK(e.at("sign") != "-");
    CHECK(e.at("certified") == (e.at("t0") == "0"));
  }

  const Run poly = run({"poly-coeff", "--A", a, "--B", ones, "--p", "2"});
  CHECK(poly.code == 0);
  const Json coeffs = run_json({"poly-coeff", "--A", a, "--B", ones, "--p", "2"});
  CHECK(coeffs.at("coeffs") == Json::array({"5", "6", "4"}));
  CHECK(run_json({"poly-coeff", "--A", a, "--B", ones, "--p", "2", "--oracle"}).at("coeffs") == coeffs.at("coeffs"));

  const Json pt = run_json({"positive-type", "--A", a, "--B", ones, "--samples", "0,1,2"});
  CHECK(pt.at("pass") == true);
  const Json mp = run_json({"m-positive", "--A", a, "--B", b, "--k", "2", "--count", "5", "--seed", "3"});
  CHECK(mp.at("pass") == true);
  CHECK(run_json({"m-positive", "--A", a, "--B", b, "--k", "2", "--count", "5", "--seed", "3"}) == mp);
}

TEST_CASE("loop subcommands") {
  const Run bound = run({"loop-bound", "--p", "4"});
  CHECK(bound.code == 0);
  CHECK(HPReal(first_line(bound.out), 256) == HPReal("-0.25", 256));
  const Json search = run_json({"loop-search", "--p", "3", "--dim", "3", "--restarts", "10", "--seed", "1"});
  CHECK(abs(HPReal(search.at("value").get<std::string>(), 256) + HPReal("0.125", 256)) < HPReal("1e-9", 256));

  const auto dir = testing::scratch_dir("cli-loops");
  const std::string family = write(dir, "family.json", Json::array({{"1"}}));
  const Run integrand = run({"integrand", "--family", family, "--lambda", "0", "--point", "1,1,1/3"});
  CHECK(integrand.code == 0);
  CHECK(first_line(integrand.out) == "1");
  CHECK(run({"integrand", "--family", family, "--lambda", "0", "--point", "1/2,1,0"}).code == cli::kDomain);
  const Json third = run_json({"third-deriv", "--family", family, "--lambda", "2", "--quad-points", "16"});
  CHECK(abs(HPReal(third.at("value").get<std::string>(), 256) - HPReal(Rational(4, 6), 256)) <
        HPReal("1e-38", 256));

  const Run example = run({"bmv-example"});
  CHECK(example.code == 0);
  CHECK(example.out.find("mode: exact") != std::string::npos);
  CHECK(run({"bmv-example", "--variant", "sideways"}).code == cli::kUsage);
}

TEST_CASE("json output is bit-identical across runs") {
  const std::vector<std::string> args{"--format", "json", "bmv-example", "--variant", "modified"};
  CHECK(run(args).out == run(args).out);
  const std::vector<std::string> dd{"--format", "json", "divdiff", "--func", "monotone:1:0@1,2@3", "--nodes", "1,1,2,5"};
  CHECK(run(dd).out == run(dd).out);
}

TEST_CASE("search subcommand") {
  const auto dir = testing::scratch_dir("cli-search");
  Json config{{"mode", "random"},     {"budget", 200},  {"seed", 4},
              {"checkpoint_interval", 50}, {"lambda_max", 8}, {"points", Json::array({Json::array({"1", "1", "1/3"})})},
              {"output", (dir / "out.jsonl").string()}, {"checkpoint", (dir / "ckpt.json").string()}};
  const std::string path = write(dir, "config.json", config);
  const Run whole = run({"--format", "json", "search", "--config", path});
  REQUIRE(whole.code == 0);
  const std::string log = testing::read_file(dir / "out.jsonl");
  CHECK(run({"search", "--config", path, "--stop-after", "70"}).code == 0);
  const Run resumed = run({"--format", "json", "search", "--resume", (dir / "ckpt.json").string(), "--workers", "2"});
  CHECK(resumed.out == whole.out);
  CHECK(testing::read_file(dir / "out.jsonl") == log);
  CHECK(run({"search"}).code == cli::kUsage);
  config["budget"] = 0;
  CHECK(run({"search", "--config", write(dir, "zero.json", config)}).code == cli::kDomain);
}

TEST_CASE("selftest negative control and json list") {
  const Run tampered = run({"selftest", "--expect", "fan-loop-3=-1/9"});
  CHECK(tampered.code == cli::kNumerical);
  CHECK(tampered.out.find("FAIL fan-loop-3") != std::string::npos);
  CHECK(run({"selftest", "--expect", "nonsense=1"}).code == cli::kUsage);

  const Run listed = run({"selftest", "--json"});
  const Json j = Json::parse(listed.out);
  REQUIRE(j.at("checks").size() == 6);
  for (const auto& c : j.at("checks")) {
    if (c.at("name") == "example-original" || c.at("name") == "example-modified") continue;
    CHECK_MESSAGE(c.at("pass") == true, c.dump());
  }
}

TEST_CASE("golden selftest passes on a fresh build") {
  const Run r = run({"selftest"});
  CHECK_MESSAGE(r.code == cli::kOk, r.out);
  CHECK(first_line(run({"--quiet", "bmv-example"}).out) == "-487062506352658941731358505750");
  CHECK(first_line(run({"--quiet", "bmv-example", "--variant", "modified"}).out) == "376189230591238013538921396773");
}
