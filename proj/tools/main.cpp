// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "skadapt/commands.hpp"

int main(int argc, char** argv) { return skadapt::cli::run(argc, argv, std::cout, std::cerr); }
