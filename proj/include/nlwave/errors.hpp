#pragma once

#include <stdexcept>
#include <string>

namespace nlwave {

/// An exponential moment was requested at or beyond the kernel's abscissa of
/// convergence.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A mathematical precondition of a construction does not hold (a < 4,
/// d >= b, s below the minimal speed, unbounded support where compact support
/// is required, ...).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative method failed to reach its tolerance, or a time integration
/// left the admissible state space.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nlwave
