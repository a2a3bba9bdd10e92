#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace res112::acceptance {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> check;
};

const std::vector<Criterion>& criteria();

// One PASS/FAIL line per criterion; 0 if all selected pass, 2 otherwise.
int run_criteria(const std::vector<int>& only, std::ostream& out);

}  // namespace res112::acceptance
