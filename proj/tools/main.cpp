#include <iostream>

#include "rwrs/cli.hpp"

int main(int argc, char** argv) { return rwrs::cli_dispatch(argc, argv, std::cout, std::cerr); }
