#include <iostream>

#include "blcs/cli/cli.hpp"

int main(int argc, char** argv) { return blcs::cli::main(argc, argv, std::cout, std::cerr); }
