#include "kawarada/experiment.hpp"

#include <iostream>

int main(int argc, char** argv) { return kawarada::run_cli(argc, argv, std::cout, std::cerr); }
