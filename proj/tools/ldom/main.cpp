#include <iostream>

#include "ldom/cli.hpp"

int main(int argc, char** argv) { return ldom::cli::run(argc, argv, std::cout, std::cerr); }
