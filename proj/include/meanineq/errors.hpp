#pragma once

#include <stdexcept>
#include <string>

namespace meanineq {

// Argument outside the open domain of a mean, interval or coupling map.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Vector/matrix dimensions that do not fit together.
class shape_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Requested an operation that needs derivative data the mean does not carry.
class capability_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// A numeric routine produced a non-finite or out-of-range result.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition (e.g. shrinking a non-violating witness).
class contract_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Malformed problem configuration text.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace meanineq
