#include <iostream>

#include "bellmzi/cli.hpp"

int main(int argc, char** argv) { return bellmzi::cli_dispatch(argc, argv, std::cout, std::cerr); }
