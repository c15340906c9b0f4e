#pragma once

#include <string>
#include <vector>

namespace spectral {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Named oracle suites behind the `verify` CLI subcommand. Each check pins
// its tolerance in code.
std::vector<CheckResult> verify_codec();
std::vector<CheckResult> verify_squash();
std::vector<CheckResult> verify_prop1();
std::vector<CheckResult> verify_gradients();
std::vector<CheckResult> verify_popart();

std::vector<CheckResult> verify_suite(const std::string& name);  // includes "all"
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace spectral
