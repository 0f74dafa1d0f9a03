#include <iostream>
#include <string>
#include <vector>

#include "bose2d_cli/app.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bose2d::cli::run(args, std::cout, std::cerr);
}
