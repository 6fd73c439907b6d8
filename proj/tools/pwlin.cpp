#include <iostream>
#include <string>
#include <vector>

#include "pwlin/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pwlin::run_cli(args, std::cout, std::cerr);
}
