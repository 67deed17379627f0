#pragma once

#include <stdexcept>
#include <string>

namespace hlx {

// Bad user input: malformed config file, out-of-range parameter, missing path.
// The CLI maps this to exit code 2.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A solver produced NaN/Inf or an input violated a numerical precondition
// (divergence defect too large, inconsistent state). CLI exit code 3.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hlx
