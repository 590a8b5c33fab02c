#include <iostream>

#include "kfol/cli.hpp"

int main(int argc, char** argv) { return kfol::run_cli(argc, argv, std::cout, std::cerr); }
