#pragma once

#include <stdexcept>
#include <string>

namespace mpising {

/// Input violates a documented invariant (bad proportions, out-of-range
/// parameters). The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A configured resource cap (state-space size, simulation work) would be
/// exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative solver did not converge within its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mpising
