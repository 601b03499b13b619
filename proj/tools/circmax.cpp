#include "circmax/harness/cli.h"

#include <iostream>

int main(int argc, char** argv) { return circmax::harness::run_cli(argc, argv, std::cout, std::cerr); }
