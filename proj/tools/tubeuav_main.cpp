#include <iostream>

#include "tubeuav/mission/commands.hpp"

int main(int argc, char** argv) {
  return tubeuav::mission::run_cli(argc, argv, std::cout, std::cerr);
}
