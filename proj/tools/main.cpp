#include <iostream>

#include "fixmag/cli.hpp"

int main(int argc, char** argv) { return fixmag::run(argc, argv, std::cout, std::cerr); }
