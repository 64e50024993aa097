#include "ultrabase/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return ultrabase::cli::run(args, {std::cin, std::cout, std::cerr});
}
