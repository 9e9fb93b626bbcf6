#pragma once

#include <stdexcept>
#include <string>

namespace ibdwaves {

// Input lies outside the admissible state or parameter domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Evaluation at the excluded corner (M, I) = (1, 0).
class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IntegrationError : public SolverError {
public:
    using SolverError::SolverError;
};

class BracketFailure : public SolverError {
public:
    using SolverError::SolverError;
};

class ShootingDivergence : public SolverError {
public:
    using SolverError::SolverError;
};

class NewtonDivergence : public SolverError {
public:
    using SolverError::SolverError;
};

class ResidualStall : public SolverError {
public:
    using SolverError::SolverError;
};

class ComplexEigenvalue : public SolverError {
public:
    using SolverError::SolverError;
};

class ContinuationFailure : public SolverError {
public:
    using SolverError::SolverError;
};

class CflViolation : public SolverError {
public:
    using SolverError::SolverError;
};

class NanDetected : public SolverError {
public:
    using SolverError::SolverError;
};

class RegimeMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class QuadratureFailure : public SolverError {
public:
    using SolverError::SolverError;
};

}  // namespace ibdwaves
