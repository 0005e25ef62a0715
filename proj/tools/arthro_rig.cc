#include <iostream>
#include <string>
#include <vector>

#include "arthro/pipeline.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return arthro::run_cli(args, std::cout, std::cerr);
}
