// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace fso {

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Result not representable as a finite double.
class OverflowError : public std::overflow_error {
  public:
    using std::overflow_error::overflow_error;
};

/// A series, continued fraction, root finder or quadrature did not reach
/// its tolerance within the iteration budget.
class ConvergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A finite-sum closed form was requested for a channel whose fading or
/// pointing parameters are not integers of the required kind.
class IntegerConditionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Model parameters violating a type invariant.
class ParameterError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent scenario / command-line configuration.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace fso
