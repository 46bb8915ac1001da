#include <iostream>
#include <string>
#include <vector>

#include "casimir/scenario.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return casimir::scenario::run(args, std::cout, std::cerr);
}
