#include <iostream>

#include "liftcal/cli.hpp"

int main(int argc, char** argv) { return liftcal::cli::run(argc, argv, std::cout, std::cerr); }
