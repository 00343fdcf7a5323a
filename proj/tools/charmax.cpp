#include <iostream>

#include "charmax_cli.hpp"

int main(int argc, char** argv) { return charmax::cli::run(argc, argv, std::cout, std::cerr); }
