#include <iostream>
#include <string>
#include <vector>

#include "purelax/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return purelax::cli::run(args, std::cout, std::cerr);
}
