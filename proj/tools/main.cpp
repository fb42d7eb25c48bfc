#include <iostream>
#include <string>
#include <vector>

#include "qaskey/cli.hpp"

int main(int argc, char** argv) {
  return qaskey::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
