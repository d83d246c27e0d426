#include <iostream>
#include <string>
#include <vector>

#include "dmdsep/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return dmdsep::RunCli(args, std::cout, std::cerr);
}
