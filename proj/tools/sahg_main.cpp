#include <iostream>

#include "sahg/cli/commands.hpp"

int main(int argc, char** argv) {
  return sahg::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
