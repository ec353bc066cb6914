#include <iostream>

#include "cavityband/cli/run.hpp"

int main(int argc, char** argv) { return cavityband::cli::main_entry(argc, argv, std::cout, std::cerr); }
