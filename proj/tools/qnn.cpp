#include <iostream>

#include "qnn/cli.hpp"

int main(int argc, char** argv) {
    return qnn::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
