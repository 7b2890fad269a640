#pragma once

#include <stdexcept>
#include <string>

namespace nonloc {

/// Invalid configuration or parameter combination. The CLI maps this to exit code 1.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Internal consistency violation (a quantity the theory guarantees came out wrong).
class internal_error : public std::logic_error {
public:
    explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

} // namespace nonloc
