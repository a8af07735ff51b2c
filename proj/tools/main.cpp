#include <iostream>

#include "laakso_lab/cli.hpp"

int main(int argc, char** argv) { return laakso_lab::cli::run(argc, argv, std::cout, std::cerr); }
