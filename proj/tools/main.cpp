#include <iostream>

#include "dispersim_cli.hpp"

int main(int argc, char** argv) {
  return dispersim::cli::run(argc, argv, std::cout, std::cerr);
}
