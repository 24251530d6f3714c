#pragma once

#include <stdexcept>
#include <string>

namespace fracinv {

// Invalid configuration or arguments. CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Linear-algebra or PDE solve failure. CLI maps this to exit code 3.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fracinv
