#include <iostream>
#include <string>
#include <vector>

#include "pcmean/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pcm::run_cli(args, std::cout, std::cerr);
}
