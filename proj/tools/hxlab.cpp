#include <iostream>

#include "hxc/cli.hpp"

int main(int argc, char** argv) { return hxc::cli_main(argc, argv, std::cout, std::cerr); }
