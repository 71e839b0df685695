#pragma once

#include <stdexcept>
#include <string>

namespace fractalnet {

// Each category maps to one CLI exit code (see tools/fractalnet.cpp).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fractalnet
