#include <iostream>
#include <string>
#include <vector>

#include "partwise/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return partwise::run_cli(args, std::cout, std::cerr);
}
