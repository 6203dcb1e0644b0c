#include <iostream>

#include "tracelap_cli/cli.hpp"

int main(int argc, char** argv) {
  return tracelap::cli::dispatch(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
