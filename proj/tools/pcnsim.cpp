#include <iostream>

#include "pcn/cli.hpp"

int main(int argc, char** argv) { return pcn::run_cli(argc, argv, std::cout, std::cerr); }
