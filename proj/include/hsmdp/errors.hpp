#pragma once

#include <stdexcept>
#include <string>

namespace hsmdp {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid or inconsistent solver configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Completing an item that is already completed.
class IllegalTransition : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// The solve budget ran out before a solution was available.
class TimeoutError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tables produced by a solver are missing an entry a consumer relies on.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// An iterative solver did not reach its tolerance within the iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace hsmdp
