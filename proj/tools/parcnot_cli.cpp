#include <iostream>

#include "parcnot/cli.hpp"

int main(int argc, char **argv) { return parcnot::run_cli(argc, argv, std::cout, std::cerr); }
