#include <iostream>
#include <string>
#include <vector>

#include "smoothforge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return smoothforge::run_cli(args, std::cout, std::cerr);
}
