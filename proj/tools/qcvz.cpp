#include <iostream>
#include <string>
#include <vector>

#include "qcvz/cli.hpp"

int main(int argc, char** argv) {
  return qcvz::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
