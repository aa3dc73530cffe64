#include <iostream>

#include "conetrace/cli.hpp"

int main(int argc, char** argv) { return conetrace::run(argc, argv, std::cout, std::cerr); }
