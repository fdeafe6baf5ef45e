#include "unfold/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return unfold::cli::run(argc, argv, std::cout, std::cerr); }
