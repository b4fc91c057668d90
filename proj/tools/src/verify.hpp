// Invariant check batteries behind `verify --suite {spectral, classical,
// quantum, semiclassics, all}`.
#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace phi4::cli {

struct CheckResult {
    std::string suite;
    std::string name;
    bool pass = false;
    double value = 0.0;   // measured quantity
    double bound = 0.0;   // threshold it was held against
    std::string detail;
};

std::vector<CheckResult> run_suite(const std::string& suite, const ExperimentConfig& cfg);

}  // namespace phi4::cli
