#include <iostream>
#include <string>
#include <vector>

#include "nfvrel/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return nfvrel::cli::run(args, std::cout, std::cerr);
}
