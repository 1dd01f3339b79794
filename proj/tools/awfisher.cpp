#include <iostream>

#include "awfisher/cli.hpp"

int main(int argc, char** argv) {
    return awfisher::run_cli(argc, argv, std::cout, std::cerr);
}
