#include <iostream>

#include "mfir/cli.hpp"

int main(int argc, char** argv) {
  return mfir::run_cli(argc, argv, std::cout, std::cerr);
}
