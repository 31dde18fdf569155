#include <iostream>

#include "fdrelay/run.hpp"

int main(int argc, char** argv) { return fdrelay::cli::run(argc, argv, std::cout, std::cerr); }
