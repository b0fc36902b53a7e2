#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace erasim {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

// Runs every acceptance criterion at its stated tolerance.
std::vector<CriterionResult> run_acceptance_suite();

// Prints one pass/fail line per criterion; returns the number of failures.
int run_acceptance_suite(std::ostream& os);

}  // namespace erasim
