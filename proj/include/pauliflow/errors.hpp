#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pauliflow {

/// Non-finite or out-of-range numeric input.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A configured size limit (permutation sum order, assignment count) was exceeded.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// The wave-function density vanished (or fell below the node threshold)
/// where a Bohm velocity was requested.
class NodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested scenario geometry cannot be realized (e.g. mismatched widths).
class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace pauliflow
