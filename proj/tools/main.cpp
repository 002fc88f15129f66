#include <iostream>
#include <string>
#include <vector>

#include "cm2pa/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cm2pa::cli::run_cli(args, std::cout, std::cerr);
}
