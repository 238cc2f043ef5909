#include <iostream>

#include "bohmflow/cli.hpp"

int main(int argc, char** argv) {
  return bohmflow::cli::run_cli(argc, argv, std::cout, std::cerr);
}
