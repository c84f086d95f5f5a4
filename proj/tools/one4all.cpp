#include <iostream>

#include "one4all/cli/commands.hpp"

int main(int argc, char** argv) { return one4all::cli::run_cli(argc, argv, std::cout, std::cerr); }
