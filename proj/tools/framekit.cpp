#include "framekit/cli.hpp"

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const auto res = framekit::cli::run(args);
  std::cout << res.out;
  std::cerr << res.err;
  return res.exit_code;
}
