#include <iostream>

#include "frontier/cli.hpp"

int main(int argc, char** argv) { return frontier::run_cli(argc, argv, std::cout, std::cerr); }
