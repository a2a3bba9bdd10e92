#include <iostream>

#include <CLI11.hpp>

#include "res112/acceptance.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"res112 acceptance suite"};
    std::vector<int> only;
    app.add_option("--only", only, "criterion numbers")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    return res112::acceptance::run_criteria(only, std::cout);
}
