#include <iostream>
#include <string>
#include <vector>

#include "expertroute/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return expertroute::run_cli(args, std::cout, std::cerr);
}
