#include <iostream>
#include <string>
#include <vector>

#include "mpising/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mpising::run_cli(args, std::cout, std::cerr);
}
