#include <iostream>

#include "qcoef/cli.hpp"

int main(int argc, char** argv) { return qcoef::cli::run(argc, argv, std::cout, std::cerr); }
