#include <iostream>

#include "floquet/cli.hpp"

int main(int argc, char** argv) { return floquet::cli::main_entry(argc, argv, std::cout, std::cerr); }
