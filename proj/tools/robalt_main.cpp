#include <iostream>

#include "robalt/cli.hpp"

int main(int argc, char** argv) { return robalt::run_cli(argc, argv, std::cout, std::cerr); }
