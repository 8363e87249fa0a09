#include <iostream>

#include "hbdiag_cli/cli.hpp"

int main(int argc, char** argv) { return hbdiag::cli::run(argc, argv, std::cout, std::cerr); }
