#include <string>
#include <vector>

#include "fmforge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fmforge::cli::run(args);
}
