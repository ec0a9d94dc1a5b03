#include <iostream>

#include "andlab/acceptance.hpp"

// Runs the full acceptance battery, one line per criterion. A criterion
// marked documented-unattainable is reported as FAIL but does not affect
// the exit status; anything else failing exits nonzero.
int main() {
    std::vector<andlab::CriterionResult> results = andlab::run_acceptance(1, {}, &std::cout);
    int unexpected = 0, documented = 0;
    for (const andlab::CriterionResult& r : results) {
        if (r.pass) continue;
        if (r.expected_unattainable)
            ++documented;
        else
            ++unexpected;
    }
    std::cout << "acceptance: " << results.size() - unexpected - documented << "/"
              << results.size() << " passed";
    if (documented > 0) std::cout << ", " << documented << " documented-unattainable";
    if (unexpected > 0) std::cout << ", " << unexpected << " unexpected failures";
    std::cout << std::endl;
    return andlab::acceptance_ok(results) ? 0 : 1;
}
