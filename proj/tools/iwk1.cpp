#include <iostream>

#include "iwk1/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return iwk1::run(args, std::cout, std::cerr).exit_code;
}
