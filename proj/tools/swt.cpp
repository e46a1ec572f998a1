#include <iostream>

#include "swt/cli.hpp"

int main(int argc, char** argv) { return swt::cli::main(argc, argv, std::cout, std::cerr); }
