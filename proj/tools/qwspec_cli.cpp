// qwspec_cli — batch front-end; see `qwspec_cli --help`

#include "qwspec/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return qwspec::cli::main(argc, argv, std::cout); }
