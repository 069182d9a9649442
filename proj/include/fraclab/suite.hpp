#pragma once

#include "fraclab/common.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fraclab {

struct SuiteOptions {
    int level = 3;  // first level of the level sweeps, which run level..level+2
    std::uint64_t seed = 1;
    std::string cache_dir;
};

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    std::vector<std::pair<std::string, double>> metrics;  // in insertion order
    std::vector<std::string> info;                        // non-gating lines
    double seconds = 0;                                   // wall time, not part of reports
};

std::vector<std::string> criterion_names();

// Criteria 1..10; determinism (11) needs two processes and lives in the acceptance driver.
CheckResult run_criterion(int id, const SuiteOptions& opt);
std::vector<CheckResult> run_suite(const SuiteOptions& opt,
                                   const std::function<void(const CheckResult&)>& progress = {});

}  // namespace fraclab
