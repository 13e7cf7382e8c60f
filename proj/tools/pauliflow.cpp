#include <iostream>
#include <string>
#include <vector>

#include "pauliflow/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return pauliflow::run_cli(args, std::cout, std::cerr);
}
