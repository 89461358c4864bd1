#include <iostream>

#include "rocfit/cli.hpp"

int main(int argc, char** argv) { return rocfit::cli::main(argc, argv, std::cout, std::cerr); }
