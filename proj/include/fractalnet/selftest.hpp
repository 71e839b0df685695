#pragma once

#include <string>
#include <vector>

namespace fractalnet {

struct SelfTestCheck {
    std::string name;
    bool passed = false;
    std::string detail;  // observed value against its expectation
};

/// Quick closed-form and property checks over every module (a few seconds).
std::vector<SelfTestCheck> run_selftest();

}  // namespace fractalnet
