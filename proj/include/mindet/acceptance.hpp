#pragma once

#include <string>
#include <vector>

namespace mindet {

struct CriterionResult {
    int number = 0;
    std::string title;
    bool pass = false;
    std::string detail;      // worst measured values, or the caught error
    double seconds = 0.0;
};

// the ten structural claims the artifact stands on, evaluated at desk scale;
// every tolerance is pinned in the implementation
std::vector<CriterionResult> run_acceptance();

} // namespace mindet
