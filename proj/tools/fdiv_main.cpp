#include <iostream>
#include <string>
#include <vector>

#include "fdiv/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return fdx::cli::run(args, std::cout, std::cerr);
}
