#include <string>
#include <vector>

#include "bridge_rate/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bridge_rate::cli::run(args);
}
