#include <iostream>

#include "jetvar/frontend/cli.hpp"

int main(int argc, char** argv) { return jetvar::run(argc, argv, std::cout, std::cerr); }
