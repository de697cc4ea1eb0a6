#include <iostream>
#include <string>
#include <vector>

#include "gaussmc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gaussmc::cli::run(args, std::cout, std::cerr);
}
