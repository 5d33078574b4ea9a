#include <string>
#include <vector>

#include "squeeze_forge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return sqf::cli::run_cli(args);
}
