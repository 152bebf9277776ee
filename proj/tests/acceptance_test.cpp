// Verification battery: one line per criterion, all must pass.
#include <iostream>

#include "bifree/acceptance.hpp"

int main() {
    const auto results = bifree::acceptance::run_all(&std::cout);
    const bool ok = bifree::acceptance::all_pass(results);
    std::cout << (ok ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << " (" << results.size()
              << " checks)\n";
    return ok ? 0 : 1;
}
