#include <iostream>
#include <string>
#include <vector>

#include "dcqkd/sweep.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dcqkd::run_cli(args, std::cout, std::cerr);
}
