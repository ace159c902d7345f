#include <iostream>

#include "mpb/cli.hpp"

int main(int argc, char** argv) { return mpb::cli::run(argc, argv, std::cout, std::cerr); }
