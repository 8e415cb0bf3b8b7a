#include <iostream>
#include <string>
#include <vector>

#include "threadlens/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return threadlens::cli::run(args, std::cout, std::cerr);
}
