#include <iostream>

#include "wcs/cli.hpp"

int main(int argc, char** argv) {
    return wcs::cli::run(argc, argv, std::cout, std::cerr);
}
