#pragma once

#include <stdexcept>
#include <string>

namespace charmax {

/// Precondition violated by the caller (bad modulus, malformed vector, ...).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A table or enumeration would exceed its configured size budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Power iteration did not settle within its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A search that is allowed to come up empty did so, and the caller needed a hit.
class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace charmax
