#include <iostream>

#include "fdpo/cli.hpp"

int main(int argc, char** argv) { return fdpo::cli::run(argc, argv, std::cout, std::cerr); }
