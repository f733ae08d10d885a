#pragma once

#include <stdexcept>
#include <string>

namespace dfr {

/// An argument lies outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// The requested combination of model and method is not supported.
struct UnsupportedError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Two independent computation paths disagreed beyond tolerance.
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace dfr
