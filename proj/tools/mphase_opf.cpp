#include <iostream>

#include "mphase/cli/cli.hpp"

int main(int argc, char** argv) { return mphase::cli::run_cli(argc, argv, std::cout, std::cerr); }
