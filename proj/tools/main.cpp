#include "omnislide/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  omnislide::cli::configure_logging();
  return omnislide::cli::run(argc, argv, std::cout, std::cerr);
}
