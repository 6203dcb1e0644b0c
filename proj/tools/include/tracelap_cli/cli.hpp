#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tracelap/json_io.hpp"

namespace tracelap::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kNumerical = 2,
  kDomain = 3,
};

/// Runs one invocation; argv[0] is the program name.
int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

struct SelftestCheck {
  std::string name;
  std::string expected;
  std::string actual;
  bool pass = false;
};

/// Expected values keyed by check name; overriding one is the negative control.
std::map<std::string, std::string> selftest_expectations();
std::vector<SelftestCheck> run_selftest(const std::map<std::string, std::string>& expectations, Precision prec);

}  // namespace tracelap::cli
