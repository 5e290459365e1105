#include <iostream>

#include "wlanloc/cli.hpp"

int main(int argc, char** argv) { return wlanloc::cli::run(argc, argv, std::cout, std::cerr); }
