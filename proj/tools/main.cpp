#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
  using namespace recipe_rl::cli;
  std::vector<std::string> args(argv + 1, argv + argc);
  RunConfig config;
  try {
    config = parseConfig(args);
  } catch (const ConfigError& e) {
    (e.exitCode() == 0 ? std::cout : std::cerr) << e.what() << '\n';
    return e.exitCode();
  }
  return runCommand(config, std::cout, std::cerr);
}
