#include <iostream>

#include "erasim/selftest.hpp"

int main() {
    const int failures = erasim::run_acceptance_suite(std::cout);
    if (failures > 0) std::cout << failures << " criteria failed\n";
    return failures == 0 ? 0 : 1;
}
