#ifndef UCIMON_ERRORS_HPP
#define UCIMON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ucimon {

/// Bad or missing user input (files, parameters, rule sets). CLI exit code 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Not enough data to perform an estimate (too few points, empty window).
class InsufficientData : public InputError {
public:
    using InputError::InputError;
};

/// An internal invariant did not hold. CLI exit code 2.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace ucimon

#endif  // UCIMON_ERRORS_HPP
