#pragma once

#include <stdexcept>
#include <string>

namespace covtest {

/// Input violates a documented precondition (sizes, levels, shapes).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Samples or fields that must share a grid do not.
class GridMismatch : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Quadrature requested on a grid with fewer than two points.
class QuadratureUndefined : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// The dense fourth-order covariance operator would exceed the configured budget.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

}  // namespace covtest
