#include <iostream>

#include "dissdoi/cli.hpp"

int main(int argc, char** argv) { return dissdoi::main_entry(argc, argv, std::cout, std::cerr); }
