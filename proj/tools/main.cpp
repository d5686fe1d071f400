#include <iostream>

#include "aprkit/cli.hpp"

int main(int argc, char** argv) {
  return aprkit::cli::run_cli(argc, argv, std::cout, std::cerr,
                              aprkit::cli::process_environment());
}
