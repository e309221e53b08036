#include <iostream>

#include "cli_run.hpp"

int main(int argc, char** argv) {
  return erlab_cli::main_with_args(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
