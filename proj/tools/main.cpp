#include <iostream>

#include "annular/cli.hpp"

int main(int argc, char** argv) { return annular::run_cli(argc, argv, std::cout, std::cerr); }
