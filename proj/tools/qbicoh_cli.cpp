#include <iostream>

#include "qbicoh/cli.hpp"

int main(int argc, char** argv) {
  return qbicoh::run_cli(argc, argv, std::cout, std::cerr);
}
