#include <iostream>

#include "quickinv/cli.hpp"

int main(int argc, char** argv) { return quickinv::cli::run(argc, argv, std::cout, std::cerr); }
