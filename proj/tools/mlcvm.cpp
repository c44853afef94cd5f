#include <iostream>
#include <string>
#include <vector>

#include "mlcvm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mlcvm::cli::run(args, std::cout, std::cerr);
}
