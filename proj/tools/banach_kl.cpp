#include "banach_kl/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return banach_kl::cli::run(argc, argv, std::cout, std::cerr); }
