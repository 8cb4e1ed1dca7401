#include <iostream>

#include "ctsn/commands.hpp"

int main(int argc, char** argv) { return ctsn::run_cli(argc, argv, std::cout, std::cerr); }
