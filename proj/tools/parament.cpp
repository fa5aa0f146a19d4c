// parament.cpp — Command-line entry point

#include <iostream>
#include <string>
#include <vector>

#include "parament/cli.hpp"

int main(int argc, char** argv)
{
    return parament::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
