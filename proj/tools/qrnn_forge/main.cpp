#include <iostream>
#include <string>
#include <vector>

#include "qrnn_forge/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qrnn::cli::run_cli(args, std::cout, std::cerr);
}
