#include <iostream>

#include "qksvm/cli.hpp"

int main(int argc, char** argv) { return qksvm::run_cli(argc, argv, std::cout, std::cerr); }
