#include <iostream>
#include <string>
#include <vector>

#include "moduli/cli.hpp"

int main(int argc, char** argv) {
  return moduli::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
