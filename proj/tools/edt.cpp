#include "edt/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return edt::cli::main(argc, argv, std::cout, std::cerr);
}
