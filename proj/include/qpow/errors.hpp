#pragma once

#include <stdexcept>
#include <string>

namespace qpow {

// A size or dimension limit was exceeded. CLI exit code 2.
struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// A flagged numeric non-convergence was escalated to a failure. CLI exit code 3.
struct convergence_error : std::runtime_error {
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

}
