#include <iostream>

#include "sbqcp/cli.hpp"

int main(int argc, char** argv) { return sbqcp::cli::run_cli(argc, argv, std::cout, std::cerr); }
