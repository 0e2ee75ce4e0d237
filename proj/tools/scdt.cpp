// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "scdt/cli.hpp"

int main(int argc, char** argv) { return scdt::cli::run_cli(argc, argv, std::cout, std::cerr); }
