#pragma once

#include <stdexcept>
#include <string>

namespace lcoc {

/// Shape mismatch, violated precondition, or malformed input.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure during a solve (non-finite state, linear solver stall).
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int step)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    int step() const { return step_; }

private:
    int step_;
};

}  // namespace lcoc
