#include <csignal>
#include <iostream>
#include <string>
#include <vector>

#include "rrmc/tools/cli.hpp"

int main(int argc, char** argv) {
  // A closed pipe shows up as a failed write instead of killing the process.
  std::signal(SIGPIPE, SIG_IGN);
  std::ios::sync_with_stdio(false);
  std::vector<std::string> args(argv + 1, argv + argc);
  return rrmc::tools::run_cli(args, std::cout, std::cerr);
}
