#include <iostream>

#include "gfa/cli/commands.hpp"

int main(int argc, char** argv) {
  return gfa::cli::run_cli(argc, argv, std::cout, std::cerr);
}
