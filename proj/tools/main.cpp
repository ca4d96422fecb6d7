#include <iostream>

#include "fuzzfeed/cli/cli.hpp"

int main(int argc, char** argv) { return fuzzfeed::cli::run_cli(argc, argv, std::cout, std::cerr); }
