#include <iostream>

#include "qbounce/commands.hpp"

int main(int argc, char** argv) { return qbounce::run_cli(argc, argv, std::cout, std::cerr); }
