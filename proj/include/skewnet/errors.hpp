#pragma once

#include <stdexcept>
#include <string>

namespace skewnet {

/// Shapes of the operands do not agree.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A scalar parameter is outside its admissible range.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The input is outside the mathematical domain of the operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A numerical kernel (SVD, eigensolver) failed.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A matrix is too close to singular for the requested operation.
struct ConditioningError : std::runtime_error {
    ConditioningError(const std::string &what, double condition)
        : std::runtime_error(what), condition(condition) {}
    double condition;
};

/// Random model generation could not satisfy the requested constraints.
struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Time-series simulation rejected the model.
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace skewnet
