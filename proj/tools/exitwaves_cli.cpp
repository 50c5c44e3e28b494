#include <iostream>

#include "exitwaves/cli_app.hpp"

int main(int argc, char** argv) { return exitwaves::run_cli(argc, argv, std::cout, std::cerr); }
