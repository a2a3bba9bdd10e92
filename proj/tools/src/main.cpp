#include <iostream>
#include <string>
#include <vector>

#include "res112/acceptance.hpp"
#include "res112/cli/commands.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return res112::cli::run(args, std::cout, std::cerr, [](const std::vector<int>& only, std::ostream& out) {
        return res112::acceptance::run_criteria(only, out);
    });
}
