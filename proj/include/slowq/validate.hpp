#pragma once

#include <string>
#include <vector>

namespace slowq {

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Self-check battery behind `slowq validate`. Tier "quick" keeps under a
/// minute; "full" adds the s = 200 solve, the complete staffing table and
/// the 100-seed coupling run. Throws std::invalid_argument on unknown tiers.
std::vector<ValidationCheck> run_validation_suite(const std::string& tier);

}  // namespace slowq
