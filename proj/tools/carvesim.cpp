#include <iostream>

#include "carving/cli.hpp"

int main(int argc, char **argv) { return carving::cli::run(argc, argv, std::cout, std::cerr); }
