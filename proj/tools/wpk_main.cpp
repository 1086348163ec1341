#include <iostream>

#include "wpk/cli.hpp"

int main(int argc, char** argv) {
  return wpk::cli::run(argc, argv, std::cout, std::cerr);
}
